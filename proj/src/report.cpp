#include "report.hpp"

#include "errors.hpp"

#include <cstdio>
#include <sstream>

namespace toda {

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json to_json(double x) { return format_double(x); }

Json to_json(const Vector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(format_double(v[i]));
    return out;
}

Json to_json(const Matrix& m)
{
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(format_double(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

Json to_json(const PhasePoint& z) { return Json{{"q", to_json(z.q())}, {"p", to_json(z.p())}}; }

Json to_json(const CorankReport& r)
{
    return Json{{"singular_values", to_json(r.singular_values)},
                {"corank", r.corank},
                {"nu", r.nu},
                {"nubar", r.nubar},
                {"rank_tol", to_json(r.rank_tol)},
                {"inconclusive", r.inconclusive},
                {"theorem_holds", r.agrees()},
                {"null_basis", to_json(Matrix(r.null_basis.transpose()))}};
}

Json to_json(const FrequencyReport& f)
{
    return Json{{"pair", f.pair.to_string()},
                {"lambda", to_json(f.lambda)},
                {"annihilator_derivative", to_json(f.derivative_at_root)},
                {"denominator", to_json(f.denominator)},
                {"m_independence", to_json(f.m_independence)},
                {"xi_eta_bracket", to_json(f.bracket)},
                {"omega", to_json(f.omega)},
                {"omega_closed_form", to_json(f.omega_closed_form)}};
}

Json to_json(const SingularPoint& sp)
{
    Json targets = Json::array();
    for (const auto& t : sp.targets)
        targets.push_back(t.to_string());
    Json freqs = Json::array();
    for (const auto& f : sp.frequencies)
        freqs.push_back(to_json(f));
    Json gaps = Json::array();
    for (double g : sp.residual_gaps)
        gaps.push_back(format_double(g));
    return Json{{"targets", targets},
                {"z", to_json(sp.z)},
                {"iterations", sp.iterations},
                {"residual_gaps", gaps},
                {"frequencies", freqs}};
}

Json to_json(const HolonomyResult& h)
{
    return Json{{"gamma", h.gamma},
                {"gammabar", h.gammabar},
                {"even_product", h.even_product},
                {"odd_product", h.odd_product}};
}

Json to_json(const MaslovResult& m, bool with_trace)
{
    Json out{{"mu", m.mu}, {"winding", to_json(m.winding)}, {"calibration_sign", m.calibration_sign}};
    if (with_trace) {
        Json trace = Json::array();
        for (const auto& s : m.winding_trace)
            trace.push_back(Json::array({format_double(s.t), format_double(s.phase)}));
        out["winding_trace"] = std::move(trace);
    }
    return out;
}

double number_from_json(const Json& j, const std::string& what)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::size_t used = 0;
        try {
            const double x = std::stod(s, &used);
            if (used == s.size())
                return x;
        } catch (const std::exception&) {
        }
    }
    throw ConfigError(what + " must be a number");
}

Vector vector_from_json(const Json& j, const std::string& what)
{
    if (!j.is_array())
        throw ConfigError(what + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = number_from_json(j[i], what + "[" + std::to_string(i) + "]");
    return v;
}

PhasePoint point_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("q") || !j.contains("p"))
        throw ConfigError("a phase point needs \"q\" and \"p\" arrays");
    return PhasePoint(vector_from_json(j.at("q"), "q"), vector_from_json(j.at("p"), "p"));
}

std::string winding_trace_csv(const MaslovResult& m)
{
    std::ostringstream os;
    os << "t,phase\n";
    for (const auto& s : m.winding_trace)
        os << format_double(s.t) << ',' << format_double(s.phase) << '\n';
    return os.str();
}

} // namespace toda
