#include "khom/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace khom {

namespace {

void write_string(std::ostream& os, const std::string& s) {
    // reuse the library's escaping for strings
    os << Json(s).dump();
}

void write(std::ostream& os, const Json& j, int indent, int depth) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{' << nl;
            bool first = true;
            // object_t is an ordered std::map, so iteration is sorted by key
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad;
                write_string(os, it.key());
                os << (indent > 0 ? ": " : ":");
                write(os, it.value(), indent, depth + 1);
            }
            os << nl << close_pad << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << '[' << nl;
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ',' << nl;
                os << pad;
                write(os, j[i], indent, depth + 1);
            }
            os << nl << close_pad << ']';
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                os << "null";
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
            os << buf;
            return;
        }
        default:
            os << j.dump();
    }
}

Json int_vector(const std::vector<BigInt>& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(x.get_str());
    return out;
}

Json coeffs_json(const KHomCoefficients& c) { return {{"n", c.level}, {"x", c.x.get_str()}, {"y", c.y.get_str()}}; }

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::ostringstream os;
    write(os, j, indent, 0);
    os << '\n';
    return os.str();
}

Json to_json(const CFExpansion& cf) {
    return {{"a0", cf.a0.get_str()}, {"digits", int_vector(cf.digits)}, {"terminated", cf.terminated}};
}

Json to_json(const ConvergentTable& table) {
    Json out = Json::array();
    for (const auto& r : table.rows()) out.push_back({{"n", r.n}, {"p", r.p.get_str()}, {"q", r.q.get_str()}});
    return out;
}

Json to_json(const IntMatrix& m) {
    Json out = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).get_str());
        out.push_back(row);
    }
    return out;
}

Json to_json(const CyclicSequence& seq) {
    Json out = Json::array();
    for (const auto& f : seq.maps()) {
        out.push_back({{"name", f.name},
                       {"from", f.domain.label},
                       {"to", f.codomain.label},
                       {"from_basis", f.domain.generators},
                       {"to_basis", f.codomain.generators},
                       {"matrix", to_json(f.matrix)}});
    }
    return out;
}

Json to_json(const std::vector<CyclicSequence::NodeReport>& nodes) {
    Json out = Json::array();
    for (const auto& n : nodes) {
        out.push_back({{"index", n.index},
                       {"group", n.group},
                       {"incoming", n.incoming},
                       {"outgoing", n.outgoing},
                       {"exact", n.verdict.exact},
                       {"witness", n.verdict.diagnostic}});
    }
    return out;
}

Json to_json(const Tolerances& tol) {
    return {{"rank", tol.rank}, {"round", tol.round}, {"unitary", tol.unitary}, {"projection", tol.projection}};
}

Json to_json(const PairingResult& r) {
    Json j = {{"module", r.module},
              {"element", r.element},
              {"value", r.value},
              {"raw", r.raw},
              {"method", method_name(r.method)},
              {"N", r.N},
              {"stable", r.stable},
              {"tolerances", to_json(r.tolerances)}};
    if (r.N_check != 0) {
        j["N_check"] = r.N_check;
        j["value_check"] = r.value_check;
        j["raw_check"] = r.raw_check;
    }
    if (r.method == PairingMethod::kernel_index) {
        j["kernel_dim"] = r.kernel_dim;
        j["cokernel_dim"] = r.cokernel_dim;
    }
    return j;
}

Json to_json(const CommutatorReport& r) {
    Json entries = Json::array();
    for (const auto& e : r.entries) {
        entries.push_back(
            {{"generator", e.generator}, {"norm", e.norm}, {"rank", e.rank}, {"singular_values", e.singular_values}});
    }
    return {{"module", r.module}, {"rank_tolerance", r.rank_tolerance}, {"commutators", entries}};
}

Json to_json(const ModuleInvariants& inv) {
    return {{"F_selfadjoint", inv.F_selfadjoint},
            {"F_involution", inv.F_involution},
            {"gamma_involution", inv.gamma_involution},
            {"gamma_anticommutes", inv.gamma_anticommutes},
            {"gamma_commutes_pi", inv.gamma_commutes_pi}};
}

Json to_json(const BratteliTower& tower) {
    Json levels = Json::array(), steps = Json::array(), coeffs = Json::array();
    for (const auto& l : tower.levels) {
        levels.push_back({{"n", l.n}, {"q_n", l.q_n.get_str()}, {"q_prev", l.q_prev.get_str()}});
        coeffs.push_back(coeffs_json(inverse_limit_coefficients(tower, l.n)));
    }
    for (const auto& s : tower.steps) steps.push_back({{"from", s.from}, {"multiplicity", s.multiplicity.get_str()}});
    return {{"cf", to_json(tower.cf)},
            {"depth", tower.depth()},
            {"rational_terminated", tower.rational_terminated()},
            {"levels", levels},
            {"steps", steps},
            {"coefficients", coeffs}};
}

Json to_json(const CoefficientComparison& c) {
    return {{"n", c.level},
            {"recursion", coeffs_json(c.recursion)},
            {"closed_form", coeffs_json(c.closed_form)},
            {"convergent_matrix", coeffs_json(c.convergent_matrix)},
            {"closed_form_matches", c.closed_form_matches},
            {"convergent_matrix_matches", c.convergent_matrix_matches},
            {"recursion_vs_identity", c.recursion_vs_identity.get_str()},
            {"recursion_vs_p1", c.recursion_vs_p1.get_str()},
            {"closed_form_vs_identity", c.closed_form_vs_identity.get_str()},
            {"closed_form_vs_p1", c.closed_form_vs_p1.get_str()}};
}

Json matrix_json(const CMatrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        out.push_back(row);
    }
    return out;
}

}  // namespace khom
