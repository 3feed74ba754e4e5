#include <CLI11.hpp>
#include <json.hpp>

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <partition_lab/partition_lab.hpp>

namespace pl = partition_lab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_refusal = 2;
constexpr int exit_failed = 3;

struct ValidationError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

void diagnostic(std::string_view kind, std::string msg)
{
    for (auto& c : msg)
        if (c == '\n' || c == '\r')
            c = ' ';
    std::cerr << "partition_lab: " << kind << ": " << msg << "\n";
}

std::int64_t parse_int(std::string const& flag, std::string const& text)
{
    std::int64_t v = 0;
    auto const* end = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ValidationError(flag + " expects an integer, got '" + text + "'");
    return v;
}

// Exact rational value of a decimal literal such as "0.25" or "1e-3".
std::optional<mpq_class> decimal_value(std::string const& text)
{
    std::string mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string::npos) {
        mantissa = text.substr(0, e);
        auto const exp_text = text.substr(e + 1);
        auto const [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || std::abs(exponent) > 400)
            return std::nullopt;
    }
    bool negative = false;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        mantissa.erase(0, 1);
    }
    std::string digits;
    bool seen_point = false;
    for (char c : mantissa) {
        if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            digits += c;
            if (seen_point)
                --exponent;
        } else {
            return std::nullopt;
        }
    }
    if (digits.empty())
        return std::nullopt;
    mpq_class v(mpz_class(digits, 10));
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(exponent)));
    if (exponent >= 0)
        v *= ten_pow;
    else
        v /= ten_pow;
    v.canonicalize();
    return negative ? mpq_class(-v) : v;
}

double parse_real(std::string const& flag, std::string const& text)
{
    double v = 0.0;
    auto const* end = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ValidationError(flag + " expects a finite decimal number, got '" + text + "'");
    if (auto exact = decimal_value(text); exact && sgn(*exact) != 0) {
        mpq_class diff = mpq_class(v) - *exact;
        diff /= *exact;
        if (std::abs(diff.get_d()) > 1e-15)
            std::cerr << "partition_lab: warning: " << flag << " " << text << " parsed as " << pl::format_double(v)
                      << " (relative rounding " << pl::format_double(diff.get_d()) << ")\n";
    }
    return v;
}

struct Flags
{
    std::optional<std::string> n, m, k1, q, alpha, j, tol, seed, samples, workers;
    std::string experiment;
    std::string format = "pretty";
    std::string kind;
    std::optional<std::string> out;

    std::optional<std::int64_t> get_int(char const* name, std::optional<std::string> const& v) const
    {
        if (!v)
            return std::nullopt;
        return parse_int(name, *v);
    }
    std::optional<double> get_real(char const* name, std::optional<std::string> const& v) const
    {
        if (!v)
            return std::nullopt;
        return parse_real(name, *v);
    }
    std::int64_t need_int(char const* name, std::optional<std::string> const& v) const
    {
        if (!v)
            throw ValidationError(std::string(name) + " is required");
        return parse_int(name, *v);
    }
    double need_real(char const* name, std::optional<std::string> const& v) const
    {
        if (!v)
            throw ValidationError(std::string(name) + " is required");
        return parse_real(name, *v);
    }
};

// Writes to --out when given, else stdout.
class Output
{
  public:
    explicit Output(std::optional<std::string> const& path)
    {
        if (path) {
            file_.open(*path);
            if (!file_)
                throw ValidationError("cannot open --out file '" + *path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

  private:
    std::ofstream file_;
};

void check_format(Flags const& f, std::initializer_list<char const*> allowed)
{
    for (auto const* a : allowed)
        if (f.format == a)
            return;
    std::string list;
    for (auto const* a : allowed)
        list += (list.empty() ? "" : ", ") + std::string(a);
    throw ValidationError("--format must be one of " + list + " for this subcommand");
}

// --- count ---------------------------------------------------------------

int cmd_count(Flags const& f, pl::CountCache& cache)
{
    check_format(f, {"pretty", "csv", "json"});
    auto const n = f.need_int("--n", f.n);
    auto const m = f.need_int("--m", f.m);
    if (n < 0 || m < 0)
        throw ValidationError("--n and --m must be >= 0");
    auto const k1 = f.get_int("--k1", f.k1);
    pl::BigInt value;
    std::string what = "count_at_most";
    if (k1) {
        if (n < 1 || m < 1)
            throw ValidationError("--k1 needs --n >= 1 and --m >= 1");
        if (*k1 < pl::ceil_div(n, m) || *k1 > n)
            throw ValidationError("--k1 must lie in [ceil(n/m), n] = [" + std::to_string(pl::ceil_div(n, m)) + ", "
                                  + std::to_string(n) + "]");
        value = cache.count_with_largest(n, m, *k1);
        what = "count_with_largest";
    } else {
        value = cache.count_at_most(n, m);
    }
    Output out(f.out);
    auto& os = out.stream();
    if (f.format == "json") {
        nlohmann::ordered_json j{{"quantity", what}, {"n", n}, {"m", m}};
        if (k1)
            j["k1"] = *k1;
        j["value"] = value.get_str();
        os << j.dump(2) << "\n";
    } else if (f.format == "csv") {
        os << "n,m" << (k1 ? ",k1" : "") << ",value\n" << n << "," << m;
        if (k1)
            os << "," << *k1;
        os << "," << value.get_str() << "\n";
    } else {
        os << value.get_str() << "\n";
    }
    return exit_ok;
}

// --- asymptotic ----------------------------------------------------------

int cmd_asymptotic(Flags const& f)
{
    check_format(f, {"pretty", "csv", "json"});
    std::string const kind = f.kind.empty() ? "szekeres" : f.kind;
    nlohmann::ordered_json j;
    if (kind == "szekeres") {
        auto const n = f.need_int("--n", f.n);
        auto const k = f.need_int("--m", f.m);
        if (n < 1 || k < 1)
            throw ValidationError("--n and --m must be >= 1");
        auto const e = pl::szekeres_eval(n, k);
        j = {{"kind", kind}, {"n", n}, {"k", k}, {"u", e.u}, {"v", e.v}, {"f", e.f_val}, {"g", e.g_val},
             {"log_estimate", e.log_estimate}, {"in_uniform_range", e.in_uniform_range}};
        if (k <= n)
            j["erdos_lehner_log_estimate"] = pl::erdos_lehner_log_estimate(n, k);
    } else if (kind == "clt") {
        double const q = f.need_real("--q", f.q);
        auto const p = pl::clt_params(q);
        j = {{"kind", kind},     {"q", p.q},           {"lambda", p.lambda},
             {"t0", p.t0},       {"gamma", p.gamma},   {"sigma2", p.sigma2},
             {"psi2_t0", p.psi2_t0}, {"sigma2_from_curvature", pl::sigma2_from_curvature(p)}};
    } else if (kind == "erdos_lehner") {
        auto const n = f.need_int("--n", f.n);
        auto const m = f.need_int("--m", f.m);
        if (m < 1 || m > n)
            throw ValidationError("erdos_lehner needs 1 <= m <= n");
        j = {{"kind", kind}, {"n", n}, {"m", m}, {"log_estimate", pl::erdos_lehner_log_estimate(n, m)}};
    } else {
        throw ValidationError("--kind for asymptotic must be szekeres, clt or erdos_lehner");
    }
    Output out(f.out);
    auto& os = out.stream();
    if (f.format == "json") {
        os << j.dump(2) << "\n";
    } else {
        if (f.format == "csv")
            os << "key,value\n";
        for (auto const& [k, v] : j.items()) {
            std::string const text = v.is_number_float() ? pl::format_double(v.get<double>()) : v.dump();
            os << k << (f.format == "csv" ? "," : ": ") << (v.is_string() ? v.get<std::string>() : text) << "\n";
        }
    }
    return exit_ok;
}

// --- sample --------------------------------------------------------------

int cmd_sample(Flags const& f, pl::CountCache& cache)
{
    check_format(f, {"pretty", "csv", "json"});
    std::string const kind = f.kind.empty() ? "geometric" : f.kind;
    auto const seed = static_cast<std::uint64_t>(f.get_int("--seed", f.seed).value_or(42));
    auto const samples = f.get_int("--samples", f.samples).value_or(1);
    if (samples < 1)
        throw ValidationError("--samples must be >= 1");
    pl::Rng rng = pl::make_stream(seed, 0);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> text_rows;
    auto push_partition = [&](pl::Partition const& p) { text_rows.push_back(p.to_string()); };

    if (kind == "geometric" || kind == "k1") {
        pl::GeometricMeasureSpec spec{f.need_int("--n", f.n), f.need_int("--m", f.m), f.need_real("--q", f.q)};
        try {
            spec.validate();
        } catch (std::invalid_argument const& e) {
            throw ValidationError(e.what());
        }
        pl::GeometricSampler sampler(cache, spec);
        for (std::int64_t i = 0; i < samples; ++i) {
            if (kind == "k1")
                text_rows.push_back(std::to_string(sampler.sample_k1(rng)));
            else
                push_partition(sampler.sample_partition(rng));
        }
    } else if (kind == "uniform") {
        auto const n = f.need_int("--n", f.n);
        auto const m = f.need_int("--m", f.m);
        auto const cap = f.get_int("--k1", f.k1).value_or(n);
        if (n < 0 || m < 0 || cap < 0)
            throw ValidationError("--n, --m, --k1 must be >= 0");
        if (sgn(cache.count_bounded(n, m, cap)) == 0)
            throw ValidationError("no partition of n into at most m parts of size <= --k1");
        for (std::int64_t i = 0; i < samples; ++i)
            push_partition(pl::sample_uniform_bounded(cache, n, m, cap, rng));
    } else if (kind == "dirichlet") {
        auto const n = f.need_int("--n", f.n);
        auto const m = f.need_int("--m", f.m);
        double const alpha = f.need_real("--alpha", f.alpha);
        if (!(alpha >= 1.0))
            throw ValidationError("--alpha must be >= 1 for the Dirichlet-kernel measure (bounded envelope)");
        pl::GeneralSampler sampler(cache, {n, m, pl::dirichlet_kernel(alpha), pl::dirichlet_kernel_sup(m, alpha), {}});
        for (std::int64_t i = 0; i < samples; ++i)
            push_partition(sampler.sample(rng));
    } else if (kind == "dirichlet_reference") {
        auto const m = f.need_int("--m", f.m);
        double const alpha = f.need_real("--alpha", f.alpha);
        for (std::int64_t i = 0; i < samples; ++i) {
            auto const y = pl::sample_dirichlet_order_stats(m, alpha, rng);
            std::string s;
            for (std::size_t k = 0; k < y.size(); ++k)
                s += (k ? " " : "") + pl::format_double(y.coords[k]);
            text_rows.push_back(s);
        }
    } else {
        throw ValidationError("--kind for sample must be geometric, k1, uniform, dirichlet or dirichlet_reference");
    }

    Output out(f.out);
    auto& os = out.stream();
    if (f.format == "json") {
        os << nlohmann::ordered_json{{"kind", kind}, {"seed", seed}, {"draws", text_rows}}.dump(2) << "\n";
    } else {
        if (f.format == "csv")
            os << "# kind: " << kind << "\n# seed: " << seed << "\ndraw\n";
        for (auto const& r : text_rows)
            os << r << "\n";
    }
    return exit_ok;
}

// --- limit ---------------------------------------------------------------

void write_xy(std::ostream& os, std::string const& format, std::vector<std::pair<std::string, std::string>> const& meta,
              std::string const& xname, std::string const& yname, std::vector<std::pair<double, double>> const& xy)
{
    if (format == "json") {
        nlohmann::ordered_json j;
        for (auto const& [k, v] : meta)
            j[k] = v;
        j["columns"] = {xname, yname};
        j["rows"] = nlohmann::ordered_json::array();
        for (auto const& [x, y] : xy)
            j["rows"].push_back({x, y});
        os << j.dump(2) << "\n";
        return;
    }
    for (auto const& [k, v] : meta)
        os << "# " << k << ": " << v << "\n";
    os << xname << "," << yname << "\n";
    for (auto const& [x, y] : xy)
        os << pl::format_double(x) << "," << pl::format_double(y) << "\n";
}

int cmd_limit(Flags const& f, pl::CountCache& cache)
{
    check_format(f, {"pretty", "csv", "json"});
    std::string const kind = f.kind.empty() ? "k1" : f.kind;
    Output out(f.out);
    auto& os = out.stream();

    if (kind == "k1" || kind == "joint" || kind == "finite") {
        pl::LimitLawSpec spec{f.need_int("--m", f.m), 0, f.need_real("--q", f.q), f.get_real("--tol", f.tol).value_or(1e-12)};
        if (kind == "finite") {
            auto const n = f.need_int("--n", f.n);
            if (spec.m < 2 || n < spec.m)
                throw ValidationError("finite needs 2 <= m <= n");
            spec.j = pl::residue_j(n, spec.m);
        } else {
            spec.j = f.need_int("--j", f.j);
        }
        try {
            spec.validate();
        } catch (std::invalid_argument const& e) {
            throw ValidationError(e.what());
        }
        std::vector<std::pair<std::string, std::string>> meta{
            {"m", std::to_string(spec.m)}, {"j", std::to_string(spec.j)}, {"q", pl::format_double(spec.q)},
            {"tol", pl::format_double(spec.tol)}};
        if (kind == "joint") {
            auto const pmf = pl::limit_pmf_k1(cache, spec);
            auto const z = pl::limit_normalizer(cache, spec);
            meta.insert(meta.begin(), {"law", "joint limit of (k_i - ceil(n/m)), probability q^{l_1}/Z"});
            meta.emplace_back("tail_bound", pl::format_double(pmf.tail_bound));
            if (f.format == "json") {
                nlohmann::ordered_json j;
                for (auto const& [k, v] : meta)
                    j[k] = v;
                j["rows"] = nlohmann::ordered_json::array();
                for (std::int64_t l = 0; l <= pmf.last(); ++l)
                    pl::for_each_joint_point(spec, l, [&](std::span<std::int64_t const> pt) {
                        j["rows"].push_back({{"l", std::vector<std::int64_t>(pt.begin(), pt.end())},
                                             {"probability", pl::limit_joint_prob(z, spec, pt)}});
                    });
                os << j.dump(2) << "\n";
            } else {
                for (auto const& [k, v] : meta)
                    os << "# " << k << ": " << v << "\n";
                os << "offsets,probability\n";
                for (std::int64_t l = 0; l <= pmf.last(); ++l)
                    pl::for_each_joint_point(spec, l, [&](std::span<std::int64_t const> pt) {
                        for (std::size_t i = 0; i < pt.size(); ++i)
                            os << (i ? " " : "") << pt[i];
                        os << "," << pl::format_double(pl::limit_joint_prob(z, spec, pt)) << "\n";
                    });
            }
            return exit_ok;
        }
        pl::DiscretePmf pmf;
        if (kind == "finite") {
            auto const n = f.need_int("--n", f.n);
            pmf = pl::geometric_offset_pmf(cache, {n, spec.m, spec.q}, spec.tol);
            meta.insert(meta.begin(), {"law", "exact pmf of k1 - ceil(n/m) at finite n"});
            meta.insert(meta.begin() + 1, {"n", std::to_string(n)});
        } else {
            pmf = pl::limit_pmf_k1(cache, spec);
            meta.insert(meta.begin(), {"law", "limit pmf of k1 - ceil(n/m), q^l |P_{ml+m-j}(m-1)| / Z"});
        }
        if (f.format == "json") {
            nlohmann::ordered_json j;
            for (auto const& [k, v] : meta)
                j[k] = v;
            j["base_offset"] = pmf.base_offset;
            j["tail_bound"] = pmf.tail_bound;
            j["probabilities"] = pmf.probs;
            os << j.dump(2) << "\n";
        } else {
            pl::write_pmf_csv(os, pmf, meta);
        }
        return exit_ok;
    }
    if (kind == "clt") {
        double const q = f.need_real("--q", f.q);
        auto const p = pl::clt_params(q);
        std::vector<std::pair<double, double>> xy;
        for (int i = -200; i <= 200; ++i) {
            double const x = 4.0 * p.sigma() * i / 200.0;
            xy.emplace_back(x, pl::clt_cdf(x, p));
        }
        write_xy(os, f.format,
                 {{"law", "N(0, sigma^2) limit of (k1 - ceil(n/m) - gamma m) / sqrt(m), CDF"},
                  {"q", pl::format_double(q)},
                  {"gamma", pl::format_double(p.gamma)},
                  {"sigma2", pl::format_double(p.sigma2)}},
                 "x", "cdf", xy);
        return exit_ok;
    }
    if (kind == "dirichlet") {
        // Density of the top coordinate for m = 2 on a grid; general m has no closed form here.
        double const alpha = f.need_real("--alpha", f.alpha);
        std::vector<std::pair<double, double>> xy;
        for (int i = 0; i <= 200; ++i) {
            double const y1 = 0.5 + 0.5 * i / 200.0;
            double const y2 = 1.0 - y1;
            if (y2 > y1)
                continue;
            xy.emplace_back(y1, pl::dirichlet_order_density(pl::SimplexPoint{{y1, y2}}, alpha));
        }
        write_xy(os, f.format,
                 {{"law", "ordered Dirichlet(alpha) density, m = 2, as a function of y_1"},
                  {"alpha", pl::format_double(alpha)}},
                 "y1", "density", xy);
        return exit_ok;
    }
    throw ValidationError("--kind for limit must be k1, joint, finite, clt or dirichlet");
}

// --- verify / report -----------------------------------------------------

pl::ExperimentConfig make_config(Flags const& f, pl::ExperimentId id)
{
    pl::ExperimentConfig cfg;
    cfg.id = id;
    cfg.seed = static_cast<std::uint64_t>(f.get_int("--seed", f.seed).value_or(42));
    cfg.workers = static_cast<int>(f.get_int("--workers", f.workers).value_or(1));
    if (cfg.workers < 1)
        throw ValidationError("--workers must be >= 1");
    auto const defaults = pl::default_params(id);
    auto set = [&](char const* flag, std::string const& name, std::optional<double> v) {
        if (!v)
            return;
        if (!defaults.contains(name))
            throw ValidationError(std::string(flag) + " does not apply to " + std::string(pl::to_string(id)));
        cfg.params[name] = *v;
    };
    auto as_double = [](std::optional<std::int64_t> v) -> std::optional<double> {
        return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
    };
    set("--n", "n", as_double(f.get_int("--n", f.n)));
    set("--m", "m", as_double(f.get_int("--m", f.m)));
    set("--q", "q", f.get_real("--q", f.q));
    set("--alpha", "alpha", f.get_real("--alpha", f.alpha));
    set("--tol", "tol", f.get_real("--tol", f.tol));
    set("--samples", "samples", as_double(f.get_int("--samples", f.samples)));
    // An explicit arm replaces the default two-arm Dirichlet run.
    if (id == pl::ExperimentId::COR_1_5_DIRICHLET && (f.n || f.alpha))
        cfg.params["n_2"] = 0;
    return cfg;
}

void write_report_files(pl::Report const& r, std::filesystem::path const& dir)
{
    std::filesystem::create_directories(dir);
    std::string const base = std::string(pl::to_string(r.id));
    std::ofstream(dir / (base + ".report.txt")) << pl::to_text(r);
    std::ofstream(dir / (base + ".report.json")) << pl::to_json(r).dump(2) << "\n";
}

void print_report(std::ostream& os, pl::Report const& r, std::string const& format)
{
    if (format == "json") {
        os << pl::to_json(r).dump(2) << "\n";
    } else if (format == "csv") {
        os << "key,value\n";
        os << "experiment_id," << pl::to_string(r.id) << "\n";
        for (auto const& [k, v] : r.statistics)
            os << k << "," << pl::format_double(v) << "\n";
        os << "pass," << (r.pass ? "true" : "false") << "\n";
    } else {
        os << pl::to_text(r);
    }
}

int cmd_verify(Flags const& f, pl::CountCache& cache)
{
    check_format(f, {"pretty", "csv", "json"});
    if (f.experiment.empty())
        throw ValidationError("--experiment is required");
    pl::ExperimentId id{};
    try {
        id = pl::parse_experiment_id(f.experiment);
    } catch (std::invalid_argument const& e) {
        throw ValidationError(e.what());
    }
    auto cfg = make_config(f, id);
    if (f.out)
        cfg.artifact_dir = std::filesystem::path(*f.out);
    pl::Report r;
    try {
        r = pl::run_experiment(cfg, cache);
    } catch (std::invalid_argument const& e) {
        throw ValidationError(e.what());
    }
    if (f.out)
        write_report_files(r, *f.out);
    print_report(std::cout, r, f.format);
    if (r.refused) {
        diagnostic("refusal", r.refusal);
        return exit_refusal;
    }
    if (!r.pass) {
        diagnostic("verification-failed", std::string(pl::to_string(id)) + " " + r.primary_statistic + "="
                                              + pl::format_double(r.primary_value().value_or(NAN)));
        return exit_failed;
    }
    return exit_ok;
}

int cmd_report(Flags const& f, pl::CountCache& cache)
{
    check_format(f, {"pretty", "csv", "json"});
    std::vector<pl::ExperimentId> ids;
    if (f.experiment.empty()) {
        ids.assign(pl::all_experiments.begin(), pl::all_experiments.end());
    } else {
        try {
            ids.push_back(pl::parse_experiment_id(f.experiment));
        } catch (std::invalid_argument const& e) {
            throw ValidationError(e.what());
        }
    }
    bool any_failed = false;
    bool any_refused = false;
    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    std::ostringstream table;
    table << "experiment               statistic                   value        threshold  pass\n";
    for (auto id : ids) {
        pl::ExperimentConfig cfg;
        cfg.id = id;
        cfg.seed = static_cast<std::uint64_t>(f.get_int("--seed", f.seed).value_or(42));
        cfg.workers = static_cast<int>(f.get_int("--workers", f.workers).value_or(1));
        if (cfg.workers < 1)
            throw ValidationError("--workers must be >= 1");
        if (f.out)
            cfg.artifact_dir = std::filesystem::path(*f.out);
        auto const r = pl::run_experiment(cfg, cache);
        if (f.out)
            write_report_files(r, *f.out);
        any_failed = any_failed || !r.pass;
        any_refused = any_refused || r.refused;
        std::string const value = pl::format_double(r.primary_value().value_or(NAN));
        std::string const verdict = r.refused ? "REFUSED" : (r.pass ? (r.escalated ? "PASS*" : "PASS") : "FAIL");
        char line[256];
        std::snprintf(line, sizeof line, "%-24s %-27s %-12s %-10s %s\n", std::string(pl::to_string(id)).c_str(),
                      r.primary_statistic.c_str(), value.c_str(), pl::format_double(r.threshold).c_str(),
                      verdict.c_str());
        table << line;
        summary.push_back({{"experiment_id", pl::to_string(id)},
                           {"primary_statistic", r.primary_statistic},
                           {"value", r.primary_value().value_or(NAN)},
                           {"threshold", r.threshold},
                           {"escalated", r.escalated},
                           {"pass", r.pass},
                           {"refused", r.refused}});
    }
    if (f.format == "json")
        std::cout << nlohmann::ordered_json{{"build", pl::build_id()}, {"experiments", summary}}.dump(2) << "\n";
    else
        std::cout << "build: " << pl::build_id() << "\n" << table.str()
                  << "(PASS* = primary threshold missed, escalation protocol passed)\n";
    if (any_refused)
        return exit_refusal;
    return any_failed ? exit_failed : exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact counting, sampling, asymptotics and limit-law verification for restricted integer "
                 "partitions P_n(m) under geometric and density-weighted measures."};
    app.set_version_flag("--version", pl::build_id());
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub, std::initializer_list<std::string_view> names) {
        for (auto name : names) {
            if (name == "n") sub->add_option("--n", f.n, "total n (nonnegative integer)");
            if (name == "m") sub->add_option("--m", f.m, "maximum number of parts m (for asymptotic: k)");
            if (name == "k1") sub->add_option("--k1", f.k1, "largest part k1 (sample --kind uniform: part cap)");
            if (name == "q") sub->add_option("--q", f.q, "geometric parameter q in (0, 1)");
            if (name == "alpha") sub->add_option("--alpha", f.alpha, "Dirichlet parameter alpha > 0");
            if (name == "j") sub->add_option("--j", f.j, "residue class j in [1, m]");
            if (name == "tol") sub->add_option("--tol", f.tol, "certified truncation tolerance");
            if (name == "seed") sub->add_option("--seed", f.seed, "64-bit seed (default 42)");
            if (name == "samples") sub->add_option("--samples", f.samples, "number of draws");
            if (name == "experiment") sub->add_option("--experiment", f.experiment, "experiment id");
            if (name == "workers") sub->add_option("--workers", f.workers, "worker threads (default 1)");
            if (name == "kind") sub->add_option("--kind", f.kind, "variant, see subcommand help");
        }
        sub->add_option("--format", f.format, "output format: pretty, csv or json")->default_str("pretty");
        sub->add_option("--out", f.out, "output file (verify/report: directory for reports and artifacts)");
    };

    auto* count = app.add_subcommand("count", "exact |P_n(m)|, or with --k1 the number with largest part k1");
    add_common(count, {"n", "m", "k1"});
    auto* asym = app.add_subcommand("asymptotic",
                                    "asymptotic evaluations; --kind szekeres (--n, --m as k), clt (--q), erdos_lehner");
    add_common(asym, {"n", "m", "q", "kind"});
    auto* sample = app.add_subcommand(
        "sample", "exact draws; --kind geometric (default), k1, uniform, dirichlet, dirichlet_reference");
    add_common(sample, {"n", "m", "k1", "q", "alpha", "seed", "samples", "kind"});
    auto* limit = app.add_subcommand(
        "limit", "limit-law tables; --kind k1 (default), joint, finite (exact at --n), clt, dirichlet");
    add_common(limit, {"n", "m", "q", "alpha", "j", "tol", "kind"});
    auto* verify = app.add_subcommand("verify", "run one experiment and emit its report");
    add_common(verify, {"n", "m", "q", "alpha", "tol", "seed", "samples", "experiment", "workers"});
    auto* report = app.add_subcommand("report", "run every experiment (or --experiment) and print a summary");
    add_common(report, {"seed", "experiment", "workers"});

    std::string experiments_help = "experiments:";
    for (auto id : pl::all_experiments)
        experiments_help += std::string(" ") + std::string(pl::to_string(id));
    app.footer(experiments_help + "\nexit codes: 0 ok, 1 invalid input, 2 refused (budget), 3 verification failed\n"
                                  "PARTITION_LAB_CACHE_DIR: optional directory persisting exact count tables");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        diagnostic("error[validation]", e.what());
        return exit_validation;
    }

    pl::CountCache cache;
    auto const cache_dir = pl::cache_dir_from_env();
    int code = exit_ok;
    try {
        if (cache_dir)
            pl::load_cache(*cache_dir, cache);
        if (*count)
            code = cmd_count(f, cache);
        else if (*asym)
            code = cmd_asymptotic(f);
        else if (*sample)
            code = cmd_sample(f, cache);
        else if (*limit)
            code = cmd_limit(f, cache);
        else if (*verify)
            code = cmd_verify(f, cache);
        else if (*report)
            code = cmd_report(f, cache);
        if (cache_dir)
            pl::save_cache(*cache_dir, cache);
    } catch (ValidationError const& e) {
        diagnostic("error[validation]", e.what());
        return exit_validation;
    } catch (pl::RefusalError const& e) {
        diagnostic("error[refusal]", e.what());
        return exit_refusal;
    } catch (std::invalid_argument const& e) {
        diagnostic("error[validation]", e.what());
        return exit_validation;
    } catch (std::domain_error const& e) {
        diagnostic("error[validation]", e.what());
        return exit_validation;
    } catch (std::exception const& e) {
        diagnostic("error[runtime]", e.what());
        return exit_validation;
    }
    return code;
}
