#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperlip/commands.hpp"
#include "hyperlip/neariso.hpp"
#include "hyperlip/rearrange.hpp"

namespace py = pybind11;
using namespace hyperlip;

namespace {

// Complex results cross the boundary as JSON text; the python package turns
// them into dicts.
std::pair<int, std::string> py_run(const std::string& command, const std::string& config_json) {
    JobConfig cfg = config_json.empty() ? JobConfig{} : parse_config(config_json);
    CommandResult res = run_command(command, cfg);
    return {res.exit_code, res.report.dump(2)};
}

py::dict py_signed_ternary(const std::string& alpha) {
    SignedTernary t = signed_ternary_expand(parse_rational(alpha));
    py::dict d;
    d["preperiod"] = t.preperiod;
    d["period"] = t.period;
    d["dual"] = t.dual;
    d["value"] = rat_to_string(t.value());
    return d;
}

IntMat to_mat(const std::vector<std::vector<long long>>& rows) {
    IntMat m;
    for (const auto& r : rows) {
        IntVec v;
        for (long long x : r) v.push_back(BigInt(x));
        m.push_back(std::move(v));
    }
    return m;
}

std::vector<std::vector<long long>> from_mat(const IntMat& m) {
    std::vector<std::vector<long long>> out;
    for (const auto& r : m) {
        std::vector<long long> v;
        for (const auto& x : r) v.push_back((long long)x);
        out.push_back(std::move(v));
    }
    return out;
}

py::dict py_frobenius(const std::vector<std::vector<long long>>& a) {
    FrobeniusForm f = frobenius_form(to_mat(a));
    py::dict d;
    d["permutation"] = f.permutation;
    py::list blocks;
    for (std::size_t i = 0; i < f.blocks.size(); ++i) {
        py::dict b;
        b["members"] = f.blocks[i];
        b["kind"] = f.kinds[i] == BlockKind::Zero        ? "zero"
                    : f.kinds[i] == BlockKind::Primitive ? "primitive"
                                                         : "irreducible";
        blocks.append(b);
    }
    d["blocks"] = blocks;
    d["permuted"] = from_mat(f.permuted);
    return d;
}

py::object py_solve(const std::vector<long long>& a, const std::vector<long long>& u,
                    long long N, long long p, bool quasi) {
    RearrangeInstance inst;
    for (long long x : a) inst.a.push_back(BigInt(x));
    inst.u = u;
    inst.target = N;
    inst.p = p;
    auto C = quasi ? solve_quasi(inst) : solve_rearrange(inst);
    if (!C) return py::none();
    return py::cast(from_mat(C->rows));
}

py::dict py_lemma41(const std::vector<std::vector<long long>>& a) {
    auto [ell, form] = lemma41_exponent(to_mat(a));
    py::dict d;
    d["exponent"] = ell;
    d["all_primitive_or_zero"] = form.all_primitive_or_zero();
    return d;
}

py::dict py_sigma_union(int alphabet, int copies, int depth, long long pair_budget) {
    LeveledGraph target = build_target_graph(copies, 1, alphabet, depth);
    SigmaMap sigma = sigma_union(target);
    int measured = verify_distortion(sigma, sigma.domain.depth, pair_budget);
    py::dict d;
    d["measured_distortion"] = measured;
    d["exhaustive"] = sigma.exhaustive;
    d["domain_depth"] = sigma.domain.depth;
    return d;
}

} // namespace

PYBIND11_MODULE(_hyperlip, m) {
    m.doc() = "augmented-tree Lipschitz equivalence toolkit";

    m.def("run", &py_run, py::arg("command"), py::arg("config_json") = "",
          "run a CLI command; returns (exit_code, report_json)");
    m.def("signed_ternary_expand", &py_signed_ternary, py::arg("alpha"));
    m.def("frobenius_form", &py_frobenius, py::arg("matrix"));
    m.def("is_primitive",
          [](const std::vector<std::vector<long long>>& a) { return is_primitive(to_mat(a)); },
          py::arg("matrix"));
    m.def("period",
          [](const std::vector<std::vector<long long>>& a) { return period(to_mat(a)); },
          py::arg("matrix"));
    m.def("lemma41_exponent", &py_lemma41, py::arg("matrix"));
    m.def("solve_rearrange", &py_solve, py::arg("a"), py::arg("u"), py::arg("N"), py::arg("p"),
          py::arg("quasi") = false);
    m.def("sigma_union_distortion", &py_sigma_union, py::arg("alphabet"), py::arg("copies"),
          py::arg("depth"), py::arg("pair_budget") = 4000000);

    py::register_exception<Error>(m, "HyperlipError");
}
