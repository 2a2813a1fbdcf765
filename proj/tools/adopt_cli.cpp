// Batch front-end: calibrate / gof / price / backtest / revenue / simulate.
// Every command reads a flat key=value config file and writes CSV reports plus
// a manifest into the output directory. All randomness is seeded explicitly,
// so outputs are byte-identical across runs and thread counts.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adopt/calibration.hpp"
#include "adopt/hedging.hpp"
#include "adopt/market_data.hpp"
#include "adopt/pricing.hpp"
#include "adopt/revenue.hpp"
#include "adopt/sde.hpp"
#include "adopt/stats.hpp"

namespace fs = std::filesystem;
using namespace adopt;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitValidation = 2;
constexpr int kExitDegenerate = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(trim(field));
    return out;
}

class RunConfig {
  public:
    RunConfig(const fs::path& path) : dir_(path.parent_path()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path.string());
        std::ostringstream raw;
        raw << in.rdbuf();
        raw_ = raw.str();
        std::istringstream lines(raw_);
        std::string line;
        while (std::getline(lines, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line without '=': '" + line + "'");
            kv_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string str(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing config key '" + key + "'");
        return it->second;
    }
    std::string str(const std::string& key, const std::string& def) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? def : it->second;
    }

    double num(const std::string& key) const { return parse_num(key, str(key)); }
    double num(const std::string& key, double def) const {
        return has(key) ? num(key) : def;
    }
    long integer(const std::string& key) const {
        const double v = num(key);
        const long r = static_cast<long>(v);
        if (static_cast<double>(r) != v) throw ConfigError("key '" + key + "' must be an integer");
        return r;
    }
    long integer(const std::string& key, long def) const {
        return has(key) ? integer(key) : def;
    }
    std::uint64_t seed() const {
        // seeds are mandatory: no wall-clock fallback
        const std::string v = str("seed");
        try {
            return std::stoull(v);
        } catch (const std::exception&) {
            throw ConfigError("bad seed '" + v + "'");
        }
    }

    std::vector<double> num_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& f : split(str(key), ',')) out.push_back(parse_num(key, f));
        if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
        return out;
    }
    std::vector<std::string> str_list(const std::string& key) const { return split(str(key), ','); }

    // Paths in the config are resolved relative to the config file itself.
    fs::path path(const std::string& key) const {
        fs::path p(str(key));
        return p.is_absolute() ? p : dir_ / p;
    }

    std::uint64_t content_hash() const {  // FNV-1a over the raw bytes
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : raw_) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

  private:
    static double parse_num(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("bad numeric value '" + v + "' for key '" + key + "'");
        }
    }

    fs::path dir_;
    std::string raw_;
    std::map<std::string, std::string> kv_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class Report {
  public:
    Report(const fs::path& path) : path_(path), out_(path) {
        if (!out_) throw ConfigError("cannot write " + path.string());
    }
    Report& row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
        return *this;
    }

  private:
    fs::path path_;
    std::ofstream out_;
};

void write_manifest(const fs::path& out_dir, const std::string& command, const RunConfig& cfg) {
    std::ofstream out(out_dir / "manifest.txt");
    out << "command=" << command << '\n';
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, cfg.content_hash());
    out << "config_fnv1a=" << hash << '\n';
    out << "seed=" << (cfg.has("seed") ? cfg.str("seed") : "none") << '\n';
    out << "version=" << kVersion << '\n';
}

DataWindow window_from(const RunConfig& cfg) {
    DataWindow w;
    w.start = Date::parse(cfg.str("window_start"));
    w.end = Date::parse(cfg.str("window_end"));
    w.validate();
    return w;
}

CorrMatrix corr_from(const RunConfig& cfg, int n) {
    if (cfg.has("corr_file")) {
        std::ifstream in(cfg.path("corr_file"));
        if (!in) throw ConfigError("cannot open corr_file");
        std::string line;
        std::getline(in, line);  // keyword header
        CorrMatrix c = CorrMatrix::identity(n);
        for (int i = 0; i < n; ++i) {
            if (!std::getline(in, line)) throw ConfigError("corr_file truncated");
            const auto fields = split(line, ',');
            if (static_cast<int>(fields.size()) != n + 1)
                throw ConfigError("corr_file row width mismatch");
            for (int j = 0; j < n; ++j) c.rho(i, j) = std::stod(fields[j + 1]);
        }
        c.validate();
        return c;
    }
    if (cfg.has("corr")) {
        const auto vals = cfg.num_list("corr");  // upper triangle, row major
        if (static_cast<int>(vals.size()) != n * (n - 1) / 2)
            throw ConfigError("key 'corr' needs n(n-1)/2 upper-triangle entries");
        CorrMatrix c = CorrMatrix::identity(n);
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) c.rho(i, j) = c.rho(j, i) = vals[idx++];
        c.validate();
        return c;
    }
    return CorrMatrix::identity(n);
}

SdeKind kind_from(const std::string& name) {
    if (name == "gbm") return SdeKind::gbm;
    if (name == "cev") return SdeKind::cev;
    if (name == "mrd") return SdeKind::mrd;
    if (name == "cir") return SdeKind::cir;
    if (name == "hwv") return SdeKind::hwv;
    throw ConfigError("unknown model '" + name + "'");
}

OptionSpec spec_from(const RunConfig& cfg) {
    OptionSpec s;
    s.fixed_cpc = cfg.num_list("F");
    if (cfg.has("keywords")) s.keywords = cfg.str_list("keywords");
    s.clicks = cfg.integer("m", 1);
    s.maturity = cfg.num("T_days") / kDaysPerYear;
    s.rate = cfg.num("r");
    const std::string match = cfg.str("match", "exact");
    if (match == "broad") {
        s.match = MatchType::broad;
        // candidates split by ';', each a list of index:weight pairs
        for (const auto& cand : split(cfg.str("weights"), ';')) {
            std::vector<std::pair<int, double>> w;
            for (const auto& pair : split(cand, ',')) {
                const auto colon = pair.find(':');
                if (colon == std::string::npos)
                    throw ConfigError("broad weight entry '" + pair + "' is not index:weight");
                w.emplace_back(std::stoi(pair.substr(0, colon)),
                               std::stod(pair.substr(colon + 1)));
            }
            s.broad.weights.push_back(std::move(w));
        }
    } else if (match != "exact") {
        throw ConfigError("match must be exact or broad");
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

struct Loaded {
    std::vector<KeywordSeries> series;
    std::vector<LogReturnSeries> returns;
};

Loaded load_input(const RunConfig& cfg, const fs::path& out_dir) {
    const auto window = window_from(cfg);
    LoadResult res;
    try {
        res = load_series(cfg.path("input"), window);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    write_rejection_report(out_dir / "rejects.csv", res.rejected);
    Loaded out;
    out.series = std::move(res.series);
    for (const auto& s : out.series) out.returns.push_back(log_returns(s));
    if (out.series.empty()) throw DegenerateError("no usable keyword series in the window");
    return out;
}

// ---------------------------------------------------------------------------

void cmd_calibrate(const RunConfig& cfg, const fs::path& out_dir) {
    const auto data = load_input(cfg, out_dir);

    Report params(out_dir / "params.csv");
    params.row({"keyword", "mu", "sigma"});
    bool any_positive_variance = false;
    for (const auto& r : data.returns) {
        const auto p = estimate_sigma(r);
        params.row({p.keyword_id, fmt(p.mu), fmt(p.sigma)});
        any_positive_variance = any_positive_variance || !p.zero_variance;
    }

    Report corr_csv(out_dir / "corr.csv");
    if (data.returns.size() > 1 && any_positive_variance) {
        const auto corr = estimate_corr(data.returns);
        std::vector<std::string> head{"keyword"};
        for (const auto& k : corr.keywords) head.push_back(k);
        corr_csv.row(head);
        for (int i = 0; i < corr.n(); ++i) {
            std::vector<std::string> row{corr.keywords[i]};
            for (int j = 0; j < corr.n(); ++j) row.push_back(fmt(corr.rho(i, j)));
            corr_csv.row(row);
        }
    } else {
        corr_csv.row({"keyword", data.series[0].keyword_id});
        corr_csv.row({data.series[0].keyword_id, fmt(1.0)});
    }
}

void cmd_gof(const RunConfig& cfg, const fs::path& out_dir) {
    const auto data = load_input(cfg, out_dir);
    const double alpha = cfg.num("alpha", 0.05);
    const int acf_lags = static_cast<int>(cfg.integer("acf_lags", 10));

    Report gof(out_dir / "gof.csv");
    gof.row({"keyword", "sw_p", "lb_p", "gbm_ok"});
    Report acf_csv(out_dir / "acf.csv");
    acf_csv.row({"keyword", "lag", "acf"});
    for (const auto& r : data.returns) {
        std::vector<double> ys;
        for (const auto& v : r.returns) ys.push_back(v.y);
        const auto rep = gof_report(ys, alpha, acf_lags);
        gof.row({r.keyword_id, fmt(rep.shapiro_wilk_p), fmt(rep.ljung_box_p),
                 rep.gbm_ok ? "true" : "false"});
        for (std::size_t lag = 0; lag < rep.acf.size(); ++lag)
            acf_csv.row({r.keyword_id, std::to_string(lag), fmt(rep.acf[lag])});
    }
}

void cmd_price(const RunConfig& cfg, const fs::path& out_dir) {
    const auto spec = spec_from(cfg);
    const auto c0 = cfg.num_list("c0");
    const auto sigma = cfg.num_list("sigma");
    const int nu = spec.n_underlying();
    if (static_cast<int>(c0.size()) != nu || static_cast<int>(sigma.size()) != nu)
        throw ConfigError("c0 and sigma must list one value per underlying keyword");
    const auto corr = corr_from(cfg, nu);
    const long n_paths = cfg.integer("n_paths", 100000);
    const std::uint64_t seed = cfg.seed();
    const std::string method = cfg.str("method", "auto");

    std::vector<PriceQuote> quotes;
    auto closed_quote = [&]() -> std::optional<PriceQuote> {
        if (spec.match != MatchType::exact) return std::nullopt;
        if (spec.n() == 1 && sigma[0] > 0.0) return price_bsm_closed(spec, c0[0], sigma[0]);
        if (spec.n() == 2 && sigma[0] > 0.0 && sigma[1] > 0.0 &&
            std::abs(corr.rho(0, 1)) < 1.0)
            return price_dual_strike_closed(spec, c0, sigma, corr.rho(0, 1));
        return std::nullopt;
    };

    if (method == "auto") {
        if (const auto q = closed_quote()) quotes.push_back(*q);
        quotes.push_back(price_mc(spec, c0, sigma, corr, n_paths, seed));
    } else if (method == "mc") {
        quotes.push_back(price_mc(spec, c0, sigma, corr, n_paths, seed));
    } else if (method == "closed") {
        const auto q = closed_quote();
        if (!q) throw ConfigError("no closed form for this option");
        quotes.push_back(*q);
    } else if (method == "quadrature") {
        quotes.push_back(price_quadrature(spec, c0, sigma, corr));
    } else {
        throw ConfigError("method must be auto, mc, closed or quadrature");
    }

    Report rep(out_dir / "quotes.csv");
    rep.row({"method", "pi", "per_click", "stderr", "n_paths", "seed"});
    for (const auto& q : quotes)
        rep.row({price_method_name(q.method), fmt(q.pi), fmt(q.per_click), fmt(q.mc_std_error),
                 std::to_string(q.n_paths), std::to_string(q.seed)});
}

void cmd_backtest(const RunConfig& cfg, const fs::path& out_dir) {
    const auto spec = spec_from(cfg);
    const int nu = spec.n_underlying();

    HedgeConfig hcfg;
    hcfg.epsilon = cfg.num("epsilon", 0.05);
    hcfg.d_conv = static_cast<int>(cfg.integer("d_conv", 30));
    hcfg.pricer_paths = cfg.integer("pricer_paths", 20000);

    std::vector<std::vector<std::vector<double>>> trials;  // [trial][day][kw]
    std::vector<double> sigma;
    CorrMatrix corr = CorrMatrix::identity(nu);
    const std::uint64_t seed = cfg.seed();

    if (cfg.has("model")) {  // synthetic trials
        SdeModel model;
        model.kind = kind_from(cfg.str("model"));
        const auto c0 = cfg.num_list("c0");
        sigma = cfg.num_list("sigma");
        if (static_cast<int>(c0.size()) != nu || static_cast<int>(sigma.size()) != nu)
            throw ConfigError("c0 and sigma must list one value per keyword");
        const auto mu = cfg.has("mu") ? cfg.num_list("mu") : c0;
        const double k = cfg.num("k", 0.5);
        for (int i = 0; i < nu; ++i) model.params.push_back({mu[i], sigma[i], k});
        corr = corr_from(cfg, nu);
        const int days = static_cast<int>(cfg.integer("days", 31));
        const int n_trials = static_cast<int>(cfg.integer("trials", 100));
        const DriftMode drift =
            cfg.str("drift", "real") == "risk_neutral" ? DriftMode::risk_neutral : DriftMode::real;
        const auto ps = simulate_path(c0, model, corr, days * kDt, days, drift, spec.rate,
                                      n_trials, seed);
        for (int t = 0; t < n_trials; ++t) {
            std::vector<std::vector<double>> path;
            for (int d = 0; d <= days; ++d) {
                std::vector<double> day(nu);
                for (int i = 0; i < nu; ++i) day[i] = ps.at(t, d, i);
                path.push_back(std::move(day));
            }
            trials.push_back(std::move(path));
        }
    } else {  // one trial over observed data
        const auto data = load_input(cfg, out_dir);
        if (static_cast<int>(data.series.size()) < nu)
            throw DegenerateError("not enough usable series for the option's keywords");
        for (int i = 0; i < nu; ++i) sigma.push_back(estimate_sigma(data.returns[i]).sigma);
        if (nu > 1) {
            std::vector<LogReturnSeries> used(data.returns.begin(), data.returns.begin() + nu);
            corr = estimate_corr(used);
        }
        std::vector<std::vector<double>> path;
        const std::size_t days = data.series[0].observations.size();
        for (std::size_t d = 0; d < days; ++d) {
            std::vector<double> day(nu);
            for (int i = 0; i < nu; ++i) day[i] = data.series[i].observations[d].cpc;
            path.push_back(std::move(day));
        }
        trials.push_back(std::move(path));
    }

    Report rep(out_dir / "backtest.csv");
    rep.row({"trial", "gamma_tilde", "r_tilde", "epsilon", "alpha", "verdict"});
    std::optional<HedgeReport> first;
    for (std::size_t t = 0; t < trials.size(); ++t) {
        hcfg.seed = seed + 0x51ed2701ull * (t + 1);
        const auto hr = backtest_hedge(spec, trials[t], sigma, corr, hcfg);
        rep.row({std::to_string(t), fmt(hr.gamma_tilde), fmt(hr.r_tilde), fmt(hr.epsilon),
                 fmt(hr.alpha), verdict_name(hr.verdict)});
        if (!first) first = hr;
    }

    Report trace(out_dir / "trace.csv");
    std::vector<std::string> head{"day", "V"};
    for (int i = 1; i <= nu; ++i) head.push_back("delta_" + std::to_string(i));
    head.push_back("Pi");
    trace.row(head);
    for (std::size_t d = 0; d < first->pi_series.size(); ++d) {
        std::vector<std::string> row{std::to_string(d), fmt(first->value_series[d])};
        for (int i = 0; i < nu; ++i) row.push_back(fmt(first->delta_series[d][i]));
        row.push_back(fmt(first->pi_series[d]));
        trace.row(row);
    }
}

void cmd_revenue(const RunConfig& cfg, const fs::path& out_dir) {
    OptionSpec spec;
    const auto c0 = cfg.num_list("c0");
    const auto sigma = cfg.num_list("sigma");
    const int n = static_cast<int>(c0.size());
    spec.fixed_cpc.assign(n, 1.0);  // placeholder, replaced per grid point
    spec.maturity = cfg.num("T_days") / kDaysPerYear;
    spec.rate = cfg.num("r");
    const auto corr = corr_from(cfg, n);

    GridSpec grid;
    grid.lo = cfg.num_list("F_lo");
    grid.hi = cfg.num_list("F_hi");
    for (double v : cfg.num_list("F_points")) grid.n_points.push_back(static_cast<int>(v));
    const long n_paths = cfg.integer("n_paths", 100000);
    const auto curve = revenue_surface(spec, c0, sigma, corr, grid, n_paths, cfg.seed());

    Report surface(out_dir / "surface.csv");
    std::vector<std::string> head;
    for (int i = 1; i <= n; ++i) head.push_back("F_" + std::to_string(i));
    head.push_back("D");
    head.push_back("stderr");
    surface.row(head);
    for (const auto& pt : curve.grid) {
        std::vector<std::string> row;
        for (double f : pt.fixed_cpc) row.push_back(fmt(f));
        row.push_back(fmt(pt.d));
        row.push_back(fmt(pt.std_error));
        surface.row(row);
    }

    Report summary(out_dir / "summary.csv");
    std::vector<std::string> shead{"point"};
    shead.insert(shead.end(), head.begin(), head.end());
    shead.push_back("boundary");
    summary.row(shead);
    const auto& best = curve.grid[curve.argmax];
    std::vector<std::string> brow{"argmax"};
    for (double f : best.fixed_cpc) brow.push_back(fmt(f));
    brow.push_back(fmt(best.d));
    brow.push_back(fmt(best.std_error));
    brow.push_back(best.boundary ? "true" : "false");
    summary.row(brow);
    std::vector<std::string> rrow{"reference"};
    for (double f : curve.reference.fixed_cpc) rrow.push_back(fmt(f));
    rrow.push_back(fmt(curve.reference.d));
    rrow.push_back(fmt(curve.reference.std_error));
    rrow.push_back("false");
    summary.row(rrow);
}

void cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
    SdeModel model;
    model.kind = kind_from(cfg.str("model"));
    const auto c0 = cfg.num_list("c0");
    const auto sigma = cfg.num_list("sigma");
    const int n = static_cast<int>(c0.size());
    if (static_cast<int>(sigma.size()) != n)
        throw ConfigError("c0 and sigma must have the same length");
    const auto mu = cfg.has("mu") ? cfg.num_list("mu") : std::vector<double>(n, cfg.num("r", 0.0));
    const double k = cfg.num("k", 0.5);
    for (int i = 0; i < n; ++i) model.params.push_back({mu[i], sigma[i], k});
    const auto corr = corr_from(cfg, n);
    const int steps = static_cast<int>(cfg.integer("steps"));
    const int paths = static_cast<int>(cfg.integer("paths"));
    const double t = cfg.num("T_days") / kDaysPerYear;
    const DriftMode drift =
        cfg.str("drift", "real") == "risk_neutral" ? DriftMode::risk_neutral : DriftMode::real;

    const auto ps =
        simulate_path(c0, model, corr, t, steps, drift, cfg.num("r", 0.0), paths, cfg.seed());
    Report rep(out_dir / "paths.csv");
    rep.row({"path", "step", "keyword", "value"});
    for (int p = 0; p < paths; ++p)
        for (int s = 0; s <= steps; ++s)
            for (int i = 0; i < n; ++i)
                rep.row({std::to_string(p), std::to_string(s), std::to_string(i),
                         fmt(ps.at(p, s, i))});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ad option pricing and arbitrage laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    int threads = 1;
    app.add_option("--threads", threads, "worker thread count")->capture_default_str();

    const std::vector<std::pair<std::string, void (*)(const RunConfig&, const fs::path&)>> cmds{
        {"calibrate", cmd_calibrate}, {"gof", cmd_gof},         {"price", cmd_price},
        {"backtest", cmd_backtest},   {"revenue", cmd_revenue}, {"simulate", cmd_simulate},
    };
    for (const auto& [name, fn] : cmds) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value config file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output directory")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    set_thread_count(threads);
    try {
        const RunConfig cfg((fs::path(config_path)));
        const fs::path out_dir(out_path);
        fs::create_directories(out_dir);
        for (const auto& [name, fn] : cmds) {
            if (app.get_subcommand(name)->parsed()) {
                fn(cfg, out_dir);
                write_manifest(out_dir, name, cfg);
                return 0;
            }
        }
        return kExitValidation;
    } catch (const DegenerateError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
}
