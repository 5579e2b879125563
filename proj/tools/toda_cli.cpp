// toda_lax: verify | singular | maslov | integrate

#include "toda/toda.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

struct TextDeleter {
    void operator()(toda_text* t) const { toda_text_destroy(t); }
};
using Text = std::unique_ptr<toda_text, TextDeleter>;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class Failure {
public:
    Failure(int code, std::string message) : code(code), message(std::move(message)) {}
    int code;
    std::string message;
};

int exit_code_for(toda_status s)
{
    switch (s) {
    case TODA_OK:
        return kExitPass;
    case TODA_ERR_INVALID_ARGUMENT:
    case TODA_ERR_DOMAIN:
    case TODA_ERR_CONFIG:
    case TODA_ERR_IO:
        return kExitUsage;
    default:
        return kExitFail;
    }
}

void check(toda_status s)
{
    if (s != TODA_OK)
        throw Failure(exit_code_for(s), std::string(toda_status_name(s)) + ": " + toda_last_error());
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Failure(kExitUsage, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& path, const toda_text* text)
{
    const std::string_view data(toda_text_data(text), toda_text_size(text));
    if (path.empty() || path == "-") {
        std::cout << data;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << data;
    if (!out)
        throw Failure(kExitUsage, "cannot write '" + path + "'");
}

Json parse_list(const std::string& text, const std::string& what)
{
    Json out = Json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double x = std::stod(item, &used);
            if (used != item.size())
                throw std::invalid_argument(item);
            out.push_back(x);
        } catch (const std::logic_error&) {
            throw Failure(kExitUsage, what + ": '" + item + "' is not a number");
        }
    }
    return out;
}

Json parse_json(const std::string& text, const std::string& what)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Failure(kExitUsage, what + ": parse error at byte " + std::to_string(e.byte));
    }
}

struct VerifyArgs {
    std::string config;
    std::string out;
    std::vector<std::pair<std::string, std::string>> overrides;
    bool timings = false;
};

int run_verify(const VerifyArgs& a)
{
    const std::string text = a.config.empty() ? std::string() : read_file(a.config);
    toda_context* raw = nullptr;
    check(toda_context_create(a.config.empty() ? nullptr : text.c_str(), &raw));
    std::unique_ptr<toda_context, void (*)(toda_context*)> ctx(raw, toda_context_destroy);
    for (const auto& [k, v] : a.overrides)
        check(toda_context_set(ctx.get(), k.c_str(), v.c_str()));
    if (a.timings)
        check(toda_context_set(ctx.get(), "timings", "true"));

    toda_text* report = nullptr;
    int failures = 0;
    int inconclusive = 0;
    check(toda_run_verify(ctx.get(), &report, &failures, &inconclusive));
    Text owned(report);
    emit(a.out, owned.get());
    if (inconclusive > 0)
        std::cerr << "warning: " << inconclusive << " check(s) inconclusive\n";
    if (failures > 0) {
        std::cerr << failures << " check(s) failed\n";
        return kExitFail;
    }
    return kExitPass;
}

struct SingularArgs {
    int n = 0;
    std::vector<std::string> targets;
    std::string seed_point;
    double seed_perturbation = 1e-2;
    int max_iter = 60;
    double degeneracy_tol = 0.0;
    double rank_tol = 0.0;
    std::string out;
};

int run_singular(const SingularArgs& a)
{
    Json req{{"n", a.n}, {"targets", a.targets}, {"seed_perturbation", a.seed_perturbation}, {"max_iter", a.max_iter}};
    if (!a.seed_point.empty())
        req["seed"] = parse_json(read_file(a.seed_point), a.seed_point);
    if (a.degeneracy_tol > 0)
        req["degeneracy_tol"] = a.degeneracy_tol;
    if (a.rank_tol > 0)
        req["rank_tol"] = a.rank_tol;
    toda_text* result = nullptr;
    check(toda_run_singular(req.dump().c_str(), &result));
    Text owned(result);
    emit(a.out, owned.get());
    return kExitPass;
}

struct MaslovArgs {
    std::string curve;
    std::string curve_json;
    std::string trace;
    std::string out;
};

int run_maslov(const MaslovArgs& a)
{
    if (a.curve.empty() == a.curve_json.empty())
        throw Failure(kExitUsage, "give exactly one of --curve or --curve-json");
    const std::string spec = a.curve.empty() ? a.curve_json : read_file(a.curve);
    toda_text* result = nullptr;
    toda_text* csv = nullptr;
    check(toda_run_maslov(spec.c_str(), &result, a.trace.empty() ? nullptr : &csv));
    Text owned(result);
    Text owned_csv(csv);
    emit(a.out, owned.get());
    if (!a.trace.empty())
        emit(a.trace, owned_csv.get());
    const Json report = Json::parse(toda_text_data(owned.get()));
    if (!report.at("theorem_holds").get<bool>()) {
        std::cerr << "holonomy product and Maslov sign disagree\n";
        return kExitFail;
    }
    return kExitPass;
}

struct IntegrateArgs {
    std::string request;
    std::string q;
    std::string p;
    std::string coeffs;
    double t_final = 1.0;
    int samples = 101;
    std::string method = "rk45";
    double rtol = 1e-10;
    double step = 1e-3;
    std::string out;
    std::string summary;
};

int run_integrate(const IntegrateArgs& a)
{
    std::string req_text;
    if (!a.request.empty()) {
        req_text = read_file(a.request);
    } else {
        if (a.q.empty() || a.p.empty() || a.coeffs.empty())
            throw Failure(kExitUsage, "--q, --p and --coeffs are required without --request");
        const Json req{{"q", parse_list(a.q, "--q")},
                       {"p", parse_list(a.p, "--p")},
                       {"coeffs", parse_list(a.coeffs, "--coeffs")},
                       {"t_final", a.t_final},
                       {"samples", a.samples},
                       {"method", a.method},
                       {"rtol", a.rtol},
                       {"step", a.step}};
        req_text = req.dump();
    }
    toda_text* csv = nullptr;
    toda_text* summary = nullptr;
    check(toda_run_integrate(req_text.c_str(), &csv, &summary));
    Text owned_csv(csv);
    Text owned_summary(summary);
    emit(a.out, owned_csv.get());
    if (!a.summary.empty())
        emit(a.summary, owned_summary.get());
    return kExitPass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Periodic Toda lattice: Lax structure, singularities and Maslov indices"};
    app.require_subcommand(1);
    app.set_version_flag("--version", toda_version());

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run the verification suites and write a JSON report");
    verify->add_option("--config", va.config, "JSON config file");
    verify->add_option("--out", va.out, "Report path (default stdout)");
    verify->add_flag("--timings", va.timings, "Record wall time per check");
    const std::vector<std::pair<std::string, std::string>> override_flags{
        {"--n", "n"},
        {"--n-min", "n_min"},
        {"--n-max", "n_max"},
        {"--seed", "seed"},
        {"--suite", "suite"},
        {"--random-points", "random_points"},
        {"--flow-t-final", "flow_t_final"},
        {"--tol.degeneracy_tol", "tol.degeneracy_tol"},
        {"--tol.rank_tol", "tol.rank_tol"},
        {"--tol.bracket_tol", "tol.bracket_tol"},
        {"--tol.ode_rtol", "tol.ode_rtol"}};
    for (const auto& [flag, key] : override_flags) {
        verify->add_option_function<std::string>(
            flag, [&va, key = key](const std::string& v) { va.overrides.emplace_back(key, v); },
            "Override config key " + key);
    }

    SingularArgs sa;
    auto* singular = app.add_subcommand("singular", "Locate points where chosen eigenvalue pairs collide");
    singular->add_option("--n", sa.n, "Number of particles")->required();
    singular->add_option("--target", sa.targets, "Pair set such as even:2 or odd:1,odd:3; one point per value")
        ->required();
    singular->add_option("--seed-point", sa.seed_point, "JSON file with the starting {q, p}");
    singular->add_option("--seed-perturbation", sa.seed_perturbation, "Offset of the default seed");
    singular->add_option("--max-iter", sa.max_iter, "Newton iteration cap");
    singular->add_option("--tol.degeneracy_tol", sa.degeneracy_tol);
    singular->add_option("--tol.rank_tol", sa.rank_tol);
    singular->add_option("--out", sa.out, "Output path (default stdout)");

    MaslovArgs ma;
    auto* maslov = app.add_subcommand("maslov", "Holonomies and Maslov index of a closed curve");
    maslov->add_option("--curve", ma.curve, "JSON curve spec file");
    maslov->add_option("--curve-json", ma.curve_json, "Inline JSON curve spec");
    maslov->add_option("--trace", ma.trace, "Write the winding trace as CSV");
    maslov->add_option("--out", ma.out, "Output path (default stdout)");

    IntegrateArgs ia;
    auto* integrate = app.add_subcommand("integrate", "Integrate a combination of the commuting flows");
    integrate->add_option("--request", ia.request, "JSON request file");
    integrate->add_option("--q", ia.q, "Comma-separated positions");
    integrate->add_option("--p", ia.p, "Comma-separated momenta");
    integrate->add_option("--coeffs", ia.coeffs, "Comma-separated flow coefficients c_1..c_n");
    integrate->add_option("--t-final", ia.t_final);
    integrate->add_option("--samples", ia.samples);
    integrate->add_option("--method", ia.method)->check(CLI::IsMember({"rk45", "verlet"}));
    integrate->add_option("--rtol", ia.rtol);
    integrate->add_option("--step", ia.step, "Verlet step");
    integrate->add_option("--out", ia.out, "CSV path (default stdout)");
    integrate->add_option("--summary", ia.summary, "JSON summary path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*verify)
            return run_verify(va);
        if (*singular)
            return run_singular(sa);
        if (*maslov)
            return run_maslov(ma);
        return run_integrate(ia);
    } catch (const Failure& f) {
        std::cerr << "toda_lax: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "toda_lax: " << e.what() << '\n';
        return kExitFail;
    }
}
