#include "ivpq/sweep.hpp"

#include "ivpq/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace ivpq {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    return value;
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_csv_double(std::string_view text) {
    if (text == "nan")
        return std::nan("");
    if (text == "inf")
        return HUGE_VAL;
    if (text == "-inf")
        return -HUGE_VAL;
    return parse_number<double>(text, "CSV field");
}

} // namespace

std::vector<std::size_t> parse_n_grid(std::string_view text) {
    text = trim(text);
    std::vector<std::size_t> out;
    if (auto dots = text.find(".."); dots != std::string_view::npos) {
        auto lo = parse_number<std::size_t>(text.substr(0, dots), "n grid start");
        auto hi = parse_number<std::size_t>(text.substr(dots + 2), "n grid end");
        if (lo == 0 || hi < lo)
            throw ConfigError("n grid range must satisfy 1 <= start <= end");
        for (std::size_t n = lo; n <= hi; n *= 2)
            out.push_back(n);
        return out;
    }
    for (auto part : split(text, ','))
        out.push_back(parse_number<std::size_t>(part, "n grid entry"));
    return out;
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
    text = trim(text);
    std::vector<std::uint64_t> out;
    if (auto dots = text.find(".."); dots != std::string_view::npos) {
        auto lo = parse_number<std::uint64_t>(text.substr(0, dots), "seed range start");
        auto hi = parse_number<std::uint64_t>(text.substr(dots + 2), "seed range end");
        if (hi < lo)
            throw ConfigError("seed range end precedes its start");
        for (auto s = lo; s <= hi; ++s)
            out.push_back(s);
        return out;
    }
    for (auto part : split(text, ','))
        out.push_back(parse_number<std::uint64_t>(part, "seed"));
    return out;
}

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    for (auto part : split(text, ','))
        out.push_back(parse_number<int>(part, "integer"));
    return out;
}

std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    for (auto part : split(text, ','))
        out.push_back(parse_number<double>(part, "number"));
    return out;
}

std::vector<SolveMode> parse_modes(std::string_view text) {
    std::vector<SolveMode> out;
    for (auto part : split(text, ',')) {
        try {
            out.push_back(parse_mode(part));
        } catch (const LookupError& e) {
            throw ConfigError(std::string("modes: ") + e.what());
        }
    }
    return out;
}

std::vector<std::string> parse_problem_list(std::string_view text) {
    std::vector<std::string> out;
    for (auto part : split(text, ','))
        out.emplace_back(part);
    return out;
}

void ExperimentConfig::validate() const {
    if (problems.empty() || std::any_of(problems.begin(), problems.end(), [](auto& p) { return p.empty(); }))
        throw ConfigError("problem: at least one non-empty problem name is required");
    if (r_grid.empty())
        throw ConfigError("r: grid is empty");
    for (int r : r_grid)
        if (r < 0 || r > kMaxSmoothness)
            throw ConfigError("r: values must lie in [0, " + std::to_string(kMaxSmoothness) + "]");
    if (rho_grid.empty())
        throw ConfigError("rho: grid is empty");
    for (double rho : rho_grid)
        if (!(rho > 0.0 && rho <= 1.0))
            throw ConfigError("rho: values must lie in (0, 1]");
    if (modes.empty())
        throw ConfigError("modes: list is empty");
    if (n_grid.empty())
        throw ConfigError("n: grid is empty");
    if (std::find(n_grid.begin(), n_grid.end(), std::size_t{0}) != n_grid.end())
        throw ConfigError("n: all step counts must be >= 1");
    if (!(delta > 0.0 && delta < 0.5))
        throw ConfigError("delta: must lie in (0, 1/2)");
    if (seeds.empty())
        throw ConfigError("seeds: list is empty");
    if (samples_per_step == 0)
        throw ConfigError("samples_per_step: must be >= 1");
    if (!(cost_constant > 0.0))
        throw ConfigError("cost_constant: must be positive");
    if (!(repetition_constant > 0.0))
        throw ConfigError("repetition_constant: must be positive");
}

ExperimentConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    static const std::map<std::string, std::set<std::string>> known = {
        {"problem", {"name", "eta"}},
        {"grid", {"r", "rho", "modes", "n", "seeds", "delta"}},
        {"oracle", {"cost_constant", "repetition_constant"}},
        {"output", {"samples_per_step", "path", "wall_time"}},
    };
    for (const auto& [section, body] : tree) {
        auto it = known.find(section);
        if (it == known.end())
            throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body)
            if (!it->second.contains(key))
                throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }

    auto get = [&](const std::string& path) -> std::optional<std::string> {
        auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '/'));
        if (!v)
            return std::nullopt;
        std::string_view s = *v;
        s = trim(s.substr(0, s.find_first_of(";#")));
        return std::string(s);
    };

    ExperimentConfig cfg;
    auto field = [&](const std::string& path, auto&& apply) {
        if (auto v = get(path)) {
            try {
                apply(*v);
            } catch (const ConfigError& e) {
                throw ConfigError(path + ": " + e.what());
            }
        }
    };
    field("problem/name", [&](const std::string& v) { cfg.problems = parse_problem_list(v); });
    field("problem/eta", [&](const std::string& v) { cfg.eta = parse_double_list(v); });
    field("grid/r", [&](const std::string& v) { cfg.r_grid = parse_int_list(v); });
    field("grid/rho", [&](const std::string& v) { cfg.rho_grid = parse_double_list(v); });
    field("grid/modes", [&](const std::string& v) { cfg.modes = parse_modes(v); });
    field("grid/n", [&](const std::string& v) { cfg.n_grid = parse_n_grid(v); });
    field("grid/seeds", [&](const std::string& v) { cfg.seeds = parse_seeds(v); });
    field("grid/delta", [&](const std::string& v) { cfg.delta = parse_number<double>(v, "delta"); });
    field("oracle/cost_constant", [&](const std::string& v) { cfg.cost_constant = parse_number<double>(v, "cost_constant"); });
    field("oracle/repetition_constant",
          [&](const std::string& v) { cfg.repetition_constant = parse_number<double>(v, "repetition_constant"); });
    field("output/samples_per_step",
          [&](const std::string& v) { cfg.samples_per_step = parse_number<std::size_t>(v, "samples_per_step"); });
    field("output/path", [&](const std::string& v) { cfg.output = v; });
    field("output/wall_time", [&](const std::string& v) {
        if (v == "true" || v == "1")
            cfg.record_wall_time = true;
        else if (v == "false" || v == "0")
            cfg.record_wall_time = false;
        else
            throw ConfigError("expected true or false");
    });
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();

    struct Cell {
        IVPProblem problem;
        int r;
        double rho;
    };
    // Build every problem up front so configuration errors surface before any solve.
    std::vector<std::vector<Cell>> cells(cfg.problems.size());
    for (std::size_t p = 0; p < cfg.problems.size(); ++p) {
        for (int r : cfg.r_grid) {
            for (double rho : cfg.rho_grid) {
                if (r == 0 && rho != 1.0)
                    continue;
                CatalogOptions opt;
                opt.r = r;
                opt.rho = rho;
                opt.eta = cfg.eta;
                try {
                    cells[p].push_back({catalog(cfg.problems[p], opt), r, rho});
                } catch (const std::exception& e) {
                    throw ConfigError("problem '" + cfg.problems[p] + "' (r=" + std::to_string(r) +
                                      "): " + e.what());
                }
                if (!cells[p].back().problem.reference)
                    throw ConfigError("problem '" + cfg.problems[p] + "' has no reference solution");
            }
        }
    }

    std::vector<SweepRow> rows;
    for (std::size_t p = 0; p < cfg.problems.size(); ++p) {
        for (SolveMode mode : cfg.modes) {
            for (const Cell& cell : cells[p]) {
                for (std::size_t n : cfg.n_grid) {
                    for (std::uint64_t seed : cfg.seeds) {
                        SweepRow row;
                        row.problem = cell.problem.name;
                        row.mode = mode;
                        row.r = cell.r;
                        row.rho = cell.rho;
                        row.n = n;
                        row.h = (cell.problem.b - cell.problem.a) / static_cast<double>(n);
                        row.seed = seed;

                        SolveConfig sc;
                        sc.n = n;
                        sc.mode = mode;
                        sc.delta = cfg.delta;
                        sc.seed = seed;
                        sc.cost_constant = cfg.cost_constant;
                        sc.repetition_constant = cfg.repetition_constant;

                        const auto start = std::chrono::steady_clock::now();
                        try {
                            const Trajectory traj = solve(cell.problem, sc);
                            row.sup_error = sup_error(traj, *cell.problem.reference, cfg.samples_per_step);
                            row.classical_evals = traj.ledger.classical_evals;
                            row.oracle_queries = traj.ledger.oracle_queries;
                            row.repetitions = traj.ledger.repetitions;
                        } catch (const DivergenceError& e) {
                            row.sup_error = HUGE_VAL;
                            row.status = "diverged at step " + std::to_string(e.step());
                        }
                        if (cfg.record_wall_time)
                            row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return rows;
}

namespace {
constexpr std::string_view kCsvHeader =
    "problem,mode,r,rho,n,h,seed,sup_error,classical_evals,oracle_queries,repetitions,wall_time,status";
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << kCsvHeader << '\n';
    for (const auto& row : rows) {
        out << row.problem << ',' << to_string(row.mode) << ',' << row.r << ',' << format_double(row.rho) << ','
            << row.n << ',' << format_double(row.h) << ',' << row.seed << ',' << format_double(row.sup_error) << ','
            << row.classical_evals << ',' << row.oracle_queries << ',' << row.repetitions << ','
            << format_double(row.wall_time) << ',' << row.status << '\n';
    }
}

std::vector<SweepRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader)
        throw ConfigError("CSV: missing or unexpected header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        auto f = split(line, ',');
        if (f.size() != 13)
            throw ConfigError("CSV: expected 13 fields, got " + std::to_string(f.size()));
        SweepRow row;
        row.problem = std::string(f[0]);
        try {
            row.mode = parse_mode(f[1]);
        } catch (const LookupError& e) {
            throw ConfigError(std::string("CSV: ") + e.what());
        }
        row.r = parse_number<int>(f[2], "r");
        row.rho = parse_csv_double(f[3]);
        row.n = parse_number<std::size_t>(f[4], "n");
        row.h = parse_csv_double(f[5]);
        row.seed = parse_number<std::uint64_t>(f[6], "seed");
        row.sup_error = parse_csv_double(f[7]);
        row.classical_evals = parse_number<std::uint64_t>(f[8], "classical_evals");
        row.oracle_queries = parse_number<std::uint64_t>(f[9], "oracle_queries");
        row.repetitions = parse_number<std::uint64_t>(f[10], "repetitions");
        row.wall_time = parse_csv_double(f[11]);
        row.status = std::string(f[12]);
        rows.push_back(std::move(row));
    }
    return rows;
}

double fit_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ContractViolation("slope fit needs at least two paired points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0)
        throw ContractViolation("slope fit needs distinct abscissae");
    return sxy / sxx;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Median over seeds of `metric`, keyed by n. Rejects mixed groups and failed rows are dropped.
template <typename Metric>
std::map<std::size_t, double> aggregate_by_n(std::span<const SweepRow> rows, Metric metric) {
    if (rows.empty())
        throw ContractViolation("no rows to fit");
    const auto& first = rows.front();
    std::map<std::size_t, std::vector<double>> by_n;
    for (const auto& row : rows) {
        if (std::tie(row.problem, row.mode, row.r, row.rho) != std::tie(first.problem, first.mode, first.r, first.rho))
            throw ContractViolation("rows must share problem, mode, r and rho");
        if (row.ok())
            by_n[row.n].push_back(metric(row));
    }
    std::map<std::size_t, double> out;
    for (auto& [n, values] : by_n)
        out[n] = median(std::move(values));
    if (out.size() < 3)
        throw ContractViolation("need at least 3 distinct n values");
    return out;
}

} // namespace

double estimate_order(std::span<const SweepRow> rows) {
    const auto agg = aggregate_by_n(rows, [](const SweepRow& r) { return r.sup_error; });
    std::map<std::size_t, double> step;
    for (const auto& row : rows)
        step.emplace(row.n, row.h);
    std::vector<double> xs, ys;
    for (const auto& [n, err] : agg) {
        if (!(err > 0.0))
            continue;
        xs.push_back(std::log2(step.at(n)));
        ys.push_back(std::log2(err));
    }
    if (xs.size() < 3)
        throw ContractViolation("need at least 3 distinct n values with positive error");
    return fit_slope(xs, ys);
}

double estimate_cost_exponent(std::span<const SweepRow> rows, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw ContractViolation("delta must lie in (0, 1)");
    const bool boosted = is_boosted(rows.empty() ? SolveMode::det_exact : rows.front().mode);
    const auto agg = aggregate_by_n(rows, [](const SweepRow& r) { return static_cast<double>(r.total_cost()); });
    std::vector<double> xs, ys;
    for (const auto& [n, cost] : agg) {
        const double log_n = std::log2(static_cast<double>(n));
        double normalized = cost;
        if (boosted)
            normalized /= log_n + std::log2(1.0 / delta);
        xs.push_back(log_n);
        ys.push_back(std::log2(normalized));
    }
    return fit_slope(xs, ys);
}

} // namespace ivpq
