// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace riskbid::cli {
namespace {

/// One JSON object whose keys must all be consumed before finish().
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json& raw(const std::string& key) {
        if (!j_.contains(key)) fail_key(key, "is required");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) fail_key(key, "must be a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : skip(key, fallback); }

    long long integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) fail_key(key, "must be an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) {
        return has(key) ? integer(key) : skip(key, fallback);
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return skip(key, fallback);
        const json& v = raw(key);
        if (!v.is_number_unsigned()) fail_key(key, "must be a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) fail_key(key, "must be a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : skip(key, fallback);
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return skip(key, fallback);
        const json& v = raw(key);
        if (!v.is_boolean()) fail_key(key, "must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) fail_key(key, "must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) fail_key(key, "must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    /// Array of [a, b] number pairs.
    std::vector<std::pair<double, double>> pairs(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) fail_key(key, "must be an array of [a, b] pairs");
        std::vector<std::pair<double, double>> out;
        for (const auto& p : v) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                fail_key(key, "must be an array of [a, b] pairs");
            out.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        return out;
    }

    /// Accepts an absent or null optional key.
    void mark(const std::string& key) { seen_.insert(key); }

    Section child(const std::string& key) { return Section(raw(key), path_ + "." + key); }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) fail_key(key, "is not a recognized key");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + " " + what); }
    [[noreturn]] void fail_key(const std::string& key, const std::string& what) const {
        throw ConfigError(path_ + "." + key + " " + what);
    }

    const std::string& path() const noexcept { return path_; }

private:
    template <class T>
    T skip(const std::string& key, T fallback) {
        seen_.insert(key);  // explicit null counts as "use the default"
        return fallback;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

UtilitySpec parse_utility(Section s, json& echo) {
    UtilitySpec u;
    const std::string family = s.text("family");
    u.shift = s.number("shift", 0.0);
    if (family == "linear") {
        u.family = Linear{};
        echo = {{"family", "linear"}};
    } else if (family == "crra") {
        const double rho = s.number("rho");
        if (rho == 1.0) {
            u.family = CrraLog{};
            echo = {{"family", "crra_log"}};
        } else {
            u.family = Crra{rho};
            echo = {{"family", "crra"}, {"rho", rho}};
        }
    } else if (family == "crra_log") {
        u.family = CrraLog{};
        echo = {{"family", "crra_log"}};
    } else if (family == "cara") {
        const double alpha = s.number("alpha");
        u.family = Cara{alpha};
        echo = {{"family", "cara"}, {"alpha", alpha}};
    } else if (family == "piecewise_linear") {
        PiecewiseLinear pl;
        json knots = json::array();
        for (auto [x, slope] : s.pairs("knots")) {
            pl.knots.push_back({x, slope});
            knots.push_back({x, slope});
        }
        u.family = std::move(pl);
        echo = {{"family", "piecewise_linear"}, {"knots", knots}};
    } else {
        s.fail_key("family", "must be one of linear, crra, crra_log, cara, piecewise_linear");
    }
    echo["shift"] = u.shift;
    s.finish();
    validate(u);
    return u;
}

MarginalDist parse_marginal(Section s, double lo, double hi, json& echo) {
    const std::string type = s.text("type");
    MarginalDist d;
    if (type == "uniform") {
        d = UniformDist{s.number("lo", lo), s.number("hi", hi)};
        echo = {{"type", "uniform"}};
    } else if (type == "power") {
        const double k = s.number("k");
        d = PowerDist{k};
        echo = {{"type", "power"}, {"k", k}};
    } else if (type == "truncated_normal") {
        const double mu = s.number("mu"), sigma = s.number("sigma");
        d = TruncatedNormalDist{mu, sigma, s.number("lo", lo), s.number("hi", hi)};
        echo = {{"type", "truncated_normal"}, {"mu", mu}, {"sigma", sigma}};
    } else {
        s.fail_key("type", "must be one of uniform, power, truncated_normal");
    }
    s.finish();
    return d;
}

ValueModel parse_values(Section s, json& echo) {
    const double lo = s.number("lo", 0.0);
    const double hi = s.number("hi", 1.0);
    const long long n = s.integer("n");
    if (n < 2 || n > 1000) s.fail_key("n", "must lie in 2..1000");
    const std::string kind = s.text("kind", "iid");
    echo = {{"lo", lo}, {"hi", hi}, {"n", n}, {"kind", kind}};
    if (kind == "iid") {
        json m;
        s.mark("marginal");
        const MarginalDist d = s.has("marginal") ? parse_marginal(s.child("marginal"), lo, hi, m)
                                                 : (m = {{"type", "uniform"}}, MarginalDist{UniformDist{lo, hi}});
        echo["marginal"] = m;
        s.finish();
        return ValueModel::iid(lo, hi, static_cast<int>(n), d);
    }
    if (kind == "mixture") {
        const json& arr = s.raw("components");
        if (!arr.is_array() || arr.empty()) s.fail_key("components", "must be a non-empty array");
        std::vector<MixtureComponent> comps;
        json ce = json::array();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Section c(arr[i], s.path() + ".components[" + std::to_string(i) + "]");
            const double w = c.number("weight");
            json m;
            comps.push_back({w, parse_marginal(c.child("marginal"), lo, hi, m)});
            c.finish();
            ce.push_back({{"weight", w}, {"marginal", m}});
        }
        echo["components"] = ce;
        s.finish();
        return ValueModel::mixture(lo, hi, static_cast<int>(n), std::move(comps));
    }
    s.fail_key("kind", "must be iid or mixture");
}

OutsideOptionSpec parse_outside(Section s, json& echo) {
    const std::string form = s.text("form", "constant");
    OutsideOptionSpec o;
    if (form == "constant") {
        const double s0 = s.number("s0", 0.0);
        o = ConstantOutside{s0};
        echo = {{"form", "constant"}, {"s0", s0}};
    } else if (form == "affine") {
        const double c0 = s.number("c0", 0.0), c1 = s.number("c1", 0.0);
        o = AffineOutside{c0, c1};
        echo = {{"form", "affine"}, {"c0", c0}, {"c1", c1}};
    } else if (form == "table") {
        TableOutside t{s.pairs("points")};
        json pts = json::array();
        for (auto [v, x] : t.points) pts.push_back({v, x});
        o = std::move(t);
        echo = {{"form", "table"}, {"points", pts}};
    } else {
        s.fail_key("form", "must be constant, affine or table");
    }
    s.finish();
    return o;
}

WinPayoffSpec parse_win_payoff(Section s, json& echo) {
    const std::string form = s.text("form", "deterministic");
    if (form == "deterministic") {
        s.finish();
        echo = {{"form", "deterministic"}};
        return WinPayoffSpec::deterministic();
    }
    if (form != "additive_noise") s.fail_key("form", "must be deterministic or additive_noise");
    const double sigma = s.number("sigma");
    Section ns = s.child("noise");
    const std::string type = ns.text("type");
    NoiseDist noise;
    json ne;
    if (type == "discrete") {
        DiscreteNoise d{ns.numbers("points"), ns.numbers("probs")};
        ne = {{"type", "discrete"}, {"points", d.points}, {"probs", d.probs}};
        noise = std::move(d);
    } else if (type == "uniform") {
        UniformNoise u{ns.number("lo", -1.0), ns.number("hi", 1.0)};
        ne = {{"type", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
        noise = u;
    } else if (type == "truncated_normal") {
        TruncatedNormalNoise t{ns.number("mu", 0.0), ns.number("sigma", 1.0), ns.number("lo", -3.0),
                               ns.number("hi", 3.0)};
        ne = {{"type", "truncated_normal"}, {"mu", t.mu}, {"sigma", t.sigma}, {"lo", t.lo}, {"hi", t.hi}};
        noise = t;
    } else {
        ns.fail_key("type", "must be discrete, uniform or truncated_normal");
    }
    ns.finish();
    s.finish();
    echo = {{"form", "additive_noise"}, {"sigma", sigma}, {"noise", ne}};
    return WinPayoffSpec::additive(std::move(noise), sigma);
}

std::optional<Format> parse_format(const std::string& f) {
    if (f == "fpa") return Format::Fpa;
    if (f == "spa") return Format::Spa;
    if (f == "uniform") return Format::Uniform;
    return std::nullopt;
}

}  // namespace

const char* to_string(Format f) noexcept {
    switch (f) {
        case Format::Fpa: return "fpa";
        case Format::Spa: return "spa";
        case Format::Uniform: return "uniform";
    }
    return "unknown";
}

bool ScenarioConfig::has_transform() const noexcept {
    return fpa ? fpa->transform.has_value() : (spa && spa->transform.has_value());
}

ScenarioConfig parse_config(const json& doc_in) {
    const json& doc = (doc_in.is_object() && doc_in.contains("config") && doc_in.at("config").is_object())
                          ? doc_in.at("config")
                          : doc_in;
    Section root(doc, "config");
    ScenarioConfig cfg;
    json& e = cfg.echo;

    const std::string fmt = root.text("format");
    const auto format = parse_format(fmt);
    if (!format) root.fail_key("format", "must be fpa, spa or uniform");
    cfg.format = *format;
    e["format"] = fmt;

    json ve, ue, oe;
    ValueModel vm = parse_values(root.child("values"), ve);
    UtilitySpec u = root.has("utility") ? parse_utility(root.child("utility"), ue)
                                        : (ue = {{"family", "linear"}, {"shift", 0.0}}, UtilitySpec{});
    std::optional<TransformSpec> phi;
    if (root.has("transform")) {
        json te;
        phi = TransformSpec{parse_utility(root.child("transform"), te)};
        e["transform"] = te;
    } else {
        root.mark("transform");
    }
    OutsideOptionSpec outside = root.has("outside_option") ? parse_outside(root.child("outside_option"), oe)
                                                           : (oe = {{"form", "constant"}, {"s0", 0.0}},
                                                              OutsideOptionSpec{ConstantOutside{}});
    e["values"] = ve;
    e["utility"] = ue;
    e["outside_option"] = oe;

    const long long grid = root.integer("grid", 257);
    if (grid < 2 || grid > 1'000'000) root.fail_key("grid", "must lie in 2..1000000");
    e["grid"] = grid;

    json tol = json::object();
    double ode_tol = 1e-8, root_tol = 1e-10;
    if (root.has("tolerances")) {
        Section t = root.child("tolerances");
        ode_tol = t.number("ode_tol", ode_tol);
        root_tol = t.number("root_tol", root_tol);
        cfg.audit.audit_tol = t.number("audit_tol", cfg.audit.audit_tol);
        t.finish();
    } else {
        root.mark("tolerances");
    }
    e["tolerances"] = {{"ode_tol", ode_tol}, {"root_tol", root_tol}, {"audit_tol", cfg.audit.audit_tol}};

    cfg.seed = root.unsigned_integer("seed", 0);
    cfg.audit.seed = cfg.seed;
    e["seed"] = cfg.seed;

    if (root.has("audit")) {
        Section a = root.child("audit");
        cfg.audit.type_grid_size = static_cast<int>(a.integer("types", cfg.audit.type_grid_size));
        cfg.audit.deviation_grid_size = static_cast<int>(a.integer("deviations", cfg.audit.deviation_grid_size));
        a.finish();
        if (cfg.audit.type_grid_size < 1 || cfg.audit.deviation_grid_size < 2)
            throw ConfigError("config.audit needs types >= 1 and deviations >= 2");
    } else {
        root.mark("audit");
    }
    e["audit"] = {{"types", cfg.audit.type_grid_size}, {"deviations", cfg.audit.deviation_grid_size}};

    if (cfg.format == Format::Fpa) {
        for (const char* key : {"win_payoff", "bracket"})
            if (root.has(key)) root.fail_key(key, "applies to spa/uniform formats only");
        const long long K = root.integer("K", 1);
        if (K != 1) root.fail_key("K", "must be 1 for the fpa format");
        FpaScenario sc{std::move(vm), outside, u, phi};
        sc.grid = static_cast<int>(grid);
        sc.ode_tol = ode_tol;
        if (root.has("boundary_bid")) sc.boundary_bid = root.number("boundary_bid");
        else root.mark("boundary_bid");
        if (root.has("start_offset")) sc.start_offset = root.number("start_offset");
        else root.mark("start_offset");
        root.finish();
        validate(sc);
        e["K"] = 1;
        e["boundary_bid"] = effective_boundary_bid(sc);
        e["start_offset"] = effective_start_offset(sc);
        cfg.fpa = std::move(sc);
        return cfg;
    }

    for (const char* key : {"boundary_bid", "start_offset"})
        if (root.has(key)) root.fail_key(key, "applies to the fpa format only");
    json we;
    WinPayoffSpec w = root.has("win_payoff") ? parse_win_payoff(root.child("win_payoff"), we)
                                             : (we = {{"form", "deterministic"}}, WinPayoffSpec::deterministic());
    long long K = 1;
    if (cfg.format == Format::Uniform) {
        K = root.integer("K");
        if (K < 2) root.fail_key("K", "must be at least 2 for the uniform format");
    } else {
        K = root.integer("K", 1);
        if (K != 1) root.fail_key("K", "must be 1 for the spa format");
    }
    SpaScenario sc{std::move(vm), outside, u, phi, w};
    sc.units = static_cast<int>(K);
    sc.grid = static_cast<int>(grid);
    sc.root_tol = root_tol;
    if (root.has("bracket")) {
        const auto b = root.numbers("bracket");
        if (b.size() != 2) root.fail_key("bracket", "must be [lo, hi]");
        sc.bracket = std::make_pair(b[0], b[1]);
    } else {
        root.mark("bracket");
    }
    root.finish();
    validate(sc);
    if (!sc.bracket) sc.bracket = default_bracket(sc);
    e["win_payoff"] = we;
    e["K"] = K;
    e["bracket"] = {sc.bracket->first, sc.bracket->second};
    cfg.spa = std::move(sc);
    return cfg;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw ConfigError(path.string() + ": " + ex.what());
    }
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

SafetyInput parse_safety(const json& doc) {
    Section root(doc, "problem");
    SafetyInput in;
    const json& states = root.raw("states");
    if (!states.is_array() || states.empty()) root.fail_key("states", "must be a non-empty array");
    for (std::size_t i = 0; i < states.size(); ++i) {
        Section s(states[i], "problem.states[" + std::to_string(i) + "]");
        StateRecord r;
        r.gamma = s.number("gamma");
        r.value = s.number("value");
        r.outside = s.number("outside");
        r.tie_alloc_high = s.flag("tie_high", false);
        r.tie_alloc_low = s.flag("tie_low", false);
        s.finish();
        in.states.push_back(r);
    }
    in.bid_a = root.number("bid_a");
    in.bid_b = root.number("bid_b");
    if (root.has("format")) {
        const auto f = parse_format(root.text("format"));
        if (!f || *f == Format::Uniform) root.fail_key("format", "must be fpa or spa");
        in.format = f;
    }
    root.finish();
    return in;
}

SafetyInput load_safety(const std::filesystem::path& path) { return parse_safety(read_json(path)); }

}  // namespace riskbid::cli
