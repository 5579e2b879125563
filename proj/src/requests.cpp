#include "requests.hpp"

#include "dynamics.hpp"
#include "errors.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>

namespace toda {

namespace {

void allow_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& what)
{
    if (!j.is_object())
        throw ConfigError(what + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
            throw ConfigError("unknown key '" + key + "' in " + what);
}

const Json& required(const Json& j, const char* key, const std::string& what)
{
    if (!j.contains(key))
        throw ConfigError(what + " is missing \"" + key + "\"");
    return j.at(key);
}

double real_or(const Json& j, const char* key, double fallback)
{
    return j.contains(key) ? number_from_json(j.at(key), key) : fallback;
}

int int_or(const Json& j, const char* key, int fallback)
{
    if (!j.contains(key))
        return fallback;
    const double x = number_from_json(j.at(key), key);
    if (x != static_cast<int>(x))
        throw ConfigError(std::string(key) + " must be an integer");
    return static_cast<int>(x);
}

std::vector<PairTarget> parse_joint(const std::string& text, int n)
{
    std::vector<PairTarget> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_pair_target(item, n));
    if (out.empty())
        throw ArgumentError("empty target set");
    return out;
}

Json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_request(ss.str());
}

struct Centre {
    PhasePoint z;
    std::optional<PairTarget> pair;
};

Centre circle_centre(const Json& c)
{
    allow_keys(c, {"point", "omega", "singular_file", "singular", "index"}, "circle center");
    if (c.contains("point"))
        return {point_from_json(c.at("point")), std::nullopt};
    if (c.contains("omega")) {
        const Json& o = c.at("omega");
        allow_keys(o, {"n", "q0", "p0"}, "omega center");
        return {omega_point(int_or(o, "n", 0), real_or(o, "q0", 0.0), real_or(o, "p0", 0.0)).z, std::nullopt};
    }
    Json doc;
    if (c.contains("singular_file"))
        doc = load_json_file(c.at("singular_file").get<std::string>());
    else if (c.contains("singular"))
        doc = c.at("singular");
    else
        throw ConfigError("circle center needs one of point, omega, singular_file, singular");
    // accept either a single point or the output of the singular command
    const Json* pt = &doc;
    if (doc.contains("points")) {
        const int index = int_or(c, "index", 0);
        if (index < 0 || index >= static_cast<int>(doc.at("points").size()))
            throw ConfigError("singular point index out of range");
        pt = &doc.at("points").at(static_cast<std::size_t>(index));
    }
    const PhasePoint z = point_from_json(required(*pt, "z", "singular point"));
    std::optional<PairTarget> pair;
    if (pt->contains("targets") && !pt->at("targets").empty())
        pair = parse_pair_target(pt->at("targets").at(0).get<std::string>(), z.n());
    return {z, pair};
}

} // namespace

Json parse_request(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

Json run_singular_request(const Json& request)
{
    allow_keys(request, {"n", "targets", "seed", "seed_perturbation", "max_iter", "degeneracy_tol", "rank_tol"},
               "singular request");
    const int n = int_or(request, "n", 0);
    if (n < 3)
        throw ArgumentError("singular points need n >= 3");
    const Json& targets = required(request, "targets", "singular request");
    if (!targets.is_array() || targets.empty())
        throw ConfigError("targets must be a non-empty array");
    FindOptions opt;
    opt.max_iter = int_or(request, "max_iter", opt.max_iter);
    opt.degeneracy_tol = real_or(request, "degeneracy_tol", opt.degeneracy_tol);
    const double rank_tol = real_or(request, "rank_tol", kDefaultRankTol);
    const double magnitude = real_or(request, "seed_perturbation", 1e-2);
    if (!(opt.degeneracy_tol > 0) || !(rank_tol > 0) || !(magnitude > 0) || opt.max_iter < 1)
        throw ConfigError("tolerances, seed_perturbation and max_iter must be positive");

    Json points = Json::array();
    for (const auto& t : targets) {
        if (!t.is_string())
            throw ConfigError("each target must be a string such as \"even:2\"");
        const auto set = parse_joint(t.get<std::string>(), n);
        const PhasePoint seed = request.contains("seed") ? point_from_json(request.at("seed"))
                                                         : perturbed_omega_seed(n, set, magnitude);
        if (seed.n() != n)
            throw ArgumentError("seed dimension does not match n");
        const SingularPoint sp = find_singular(seed, set, opt);
        Json rec = to_json(sp);
        rec["corank"] = to_json(corank(sp.z, rank_tol, opt.degeneracy_tol));
        points.push_back(std::move(rec));
    }
    return Json{{"n", n}, {"points", points}};
}

MaslovOutcome run_maslov_request(const Json& curve)
{
    allow_keys(curve, {"type", "samples", "center", "pair", "radius", "degeneracy_tol"}, "curve spec");
    const std::string type = required(curve, "type", "curve spec").get<std::string>();
    const double dtol = real_or(curve, "degeneracy_tol", kDefaultDegeneracyTol);
    if (!(dtol > 0))
        throw ConfigError("degeneracy_tol must be positive");

    std::optional<ClosedCurve> loop;
    if (type == "samples") {
        const Json& s = required(curve, "samples", "curve spec");
        if (!s.is_array() || s.size() < 3)
            throw ConfigError("a sampled curve needs at least 3 points");
        std::vector<PhasePoint> pts;
        for (const auto& p : s)
            pts.push_back(point_from_json(p));
        loop = ClosedCurve::from_samples(std::move(pts));
    } else if (type == "circle") {
        const Centre c = circle_centre(required(curve, "center", "circle spec"));
        PairTarget pair;
        if (curve.contains("pair"))
            pair = parse_pair_target(curve.at("pair").get<std::string>(), c.z.n());
        else if (c.pair)
            pair = *c.pair;
        else
            throw ConfigError("circle spec needs \"pair\"");
        const double radius = real_or(curve, "radius", 1e-3);
        const int samples = int_or(curve, "samples", 128);
        if (!(radius > 0) || samples < 8)
            throw ConfigError("radius must be positive and samples at least 8");
        loop = circle_around(c.z, pair, radius, samples, dtol);
    } else {
        throw ConfigError("unknown curve type '" + type + "'");
    }

    TransportOptions transport;
    transport.degeneracy_tol = dtol;
    const HolonomyCheck h = check_holonomy_theorem(*loop, transport);
    Json report{{"n", loop->n()},
                {"maslov", to_json(h.maslov, false)},
                {"holonomy", to_json(h.holonomy)},
                {"maslov_sign", h.maslov_sign},
                {"theorem_holds", h.passed}};
    return {std::move(report), winding_trace_csv(h.maslov)};
}

IntegrateOutcome run_integrate_request(const Json& request)
{
    allow_keys(request, {"q", "p", "coeffs", "t_final", "samples", "method", "rtol", "atol", "step"},
               "integrate request");
    const PhasePoint z = point_from_json(request);
    const Vector c = vector_from_json(required(request, "coeffs", "integrate request"), "coeffs");
    if (c.size() != z.n())
        throw ArgumentError("coeffs must have n entries");
    const double t_final = real_or(request, "t_final", 1.0);
    const int samples = int_or(request, "samples", 101);
    if (!(t_final > 0) || samples < 2)
        throw ConfigError("t_final must be positive and samples at least 2");
    FlowOptions opt;
    opt.rtol = real_or(request, "rtol", opt.rtol);
    opt.atol = real_or(request, "atol", opt.atol);
    opt.fixed_step = real_or(request, "step", opt.fixed_step);
    if (!(opt.rtol > 0) || !(opt.atol > 0) || !(opt.fixed_step > 0))
        throw ConfigError("rtol, atol and step must be positive");
    const std::string method = request.contains("method") ? request.at("method").get<std::string>() : "rk45";
    if (method == "rk45")
        opt.method = FlowMethod::adaptive_rk45;
    else if (method == "verlet")
        opt.method = FlowMethod::verlet;
    else
        throw ConfigError("method must be rk45 or verlet");

    const Trajectory traj = integrate_flow(z, c, uniform_times(t_final, samples), opt);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    Json summary{{"n", z.n()},
                 {"method", method},
                 {"samples", traj.samples.size()},
                 {"t_final", format_double(t_final)},
                 {"integral_drift", format_double(traj.integral_drift())},
                 {"final", to_json(traj.samples.back().z)}};
    return {std::move(summary), csv.str()};
}

} // namespace toda
