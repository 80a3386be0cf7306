#include "hyperlip/commands.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include "hyperlip/classify.hpp"
#include "hyperlip/neariso.hpp"
#include "hyperlip/rearrange.hpp"

namespace hyperlip {

using ojson = nlohmann::ordered_json;

namespace {

ojson matrix_json(const IntMat& m) {
    ojson rows = ojson::array();
    for (const auto& row : m) {
        ojson r = ojson::array();
        for (const auto& x : row) {
            if (x >= std::numeric_limits<std::int64_t>::min() &&
                x <= std::numeric_limits<std::int64_t>::max())
                r.push_back((std::int64_t)x);
            else
                r.push_back(x.str());
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

ojson classes_json(const ClassificationReport& rep) {
    ojson arr = ojson::array();
    for (const auto& c : rep.classes) {
        ojson e;
        std::string name;
        if (c.representative.size() == 1) {
            name = c.representative[0];
        } else {
            name = "{";
            for (std::size_t i = 0; i < c.representative.size(); ++i) {
                if (i) name += ",";
                name += c.representative[i];
            }
            name += "}";
        }
        e["representative"] = name;
        e["level"] = c.level;
        e["size"] = c.size;
        arr.push_back(std::move(e));
    }
    return arr;
}

ojson classification_json(const ClassificationReport& rep) {
    ojson r;
    r["verdict"] = rep.verdict == Verdict::Simple ? "simple" : "inconclusive";
    r["budget"] = rep.budget;
    r["class_count"] = (int)rep.classes.size();
    r["classes"] = classes_json(rep);
    if (rep.verdict == Verdict::Simple) {
        r["sizes"] = rep.sizes;
        r["incidence"] = matrix_json(rep.incidence);
        r["stabilization_depth"] = rep.stabilization_depth;
        r["eigen_ok"] = verify_eigen(rep, rep.alphabet);
    }
    return r;
}

ojson graph_summary(const LeveledGraph& g) {
    ojson levels = ojson::array();
    for (int n = 0; n <= g.depth; ++n) {
        ojson e;
        e["level"] = n;
        e["size"] = g.level_size(n);
        e["hedges"] = (int)g.levels[n].hedges.size();
        levels.push_back(std::move(e));
    }
    ojson r;
    r["source"] = source_name(g.source);
    r["alphabet"] = g.alphabet;
    r["depth"] = g.depth;
    r["levels"] = std::move(levels);
    return r;
}

ojson sigma_json(const SigmaMap& sigma) {
    ojson r;
    ojson tgt;
    tgt["source"] = source_name(sigma.target.source);
    tgt["alphabet"] = sigma.target.alphabet;
    tgt["depth"] = sigma.target.depth;
    tgt["level1"] = sigma.target.level_size(std::min(1, sigma.target.depth));
    r["target"] = std::move(tgt);
    ojson exc;
    exc["domain"] = sigma.exceptions_domain;
    ojson texc = ojson::array();
    std::size_t limit = std::min<std::size_t>(sigma.exceptions_target.size(), 32);
    for (std::size_t i = 0; i < limit; ++i) texc.push_back(sigma.exceptions_target[i]);
    exc["target"] = std::move(texc);
    exc["target_count"] = (int)sigma.exceptions_target.size();
    r["exceptions"] = std::move(exc);
    r["measured_distortion"] = sigma.measured_distortion;
    r["depths_checked"] = sigma.depths_checked;
    r["exhaustive"] = sigma.exhaustive;
    if (sigma.k_exponent > 1) r["telescoped_by"] = sigma.k_exponent;
    return r;
}

int class_budget(const JobConfig& cfg) {
    return cfg.budgets.cls > 0 ? cfg.budgets.cls : cfg.depth - 2;
}

IntMat matrix_from_json(const nlohmann::json& j, const std::string& what) {
    require(j.is_array() && !j.empty(), "InvalidArgument", what + " must be a matrix");
    IntMat m;
    for (const auto& row : j) {
        require(row.is_array(), "InvalidArgument", what + " must be a matrix");
        IntVec r;
        for (const auto& x : row) r.push_back(BigInt(x.get<std::int64_t>()));
        m.push_back(std::move(r));
    }
    return m;
}

CommandResult cmd_cantor_union(const JobConfig& cfg);

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{
        "build",     "components", "classify",      "incidence", "frobenius", "rearrange",
        "near-isometry", "verify", "union",         "cantor-union", "telescope", "export-dot"};
    return names;
}

CommandResult run_command(const std::string& command, const JobConfig& cfg) {
    CommandResult res;
    res.report["schema"] = "1";
    res.report["command"] = command;
    try {
        if (command == "build") {
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            res.report["graph"] = graph_summary(g);
            if (g.system) {
                auto margin = condition_h_margin(*g.system, cfg.depth);
                res.report["condition_h_margin"] =
                    margin ? ojson(rat_to_string(*margin)) : ojson("infinity");
            }
            if (!cfg.out_dot.empty()) {
                std::ofstream out(cfg.out_dot);
                out << export_dot(g);
                res.report["dot"] = cfg.out_dot;
            }
        } else if (command == "components") {
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            ojson levels = ojson::array();
            for (int n = 0; n <= g.depth; ++n) {
                ojson e;
                e["level"] = n;
                ojson comps = ojson::array();
                for (const auto& comp : components(g, n)) {
                    ojson names = ojson::array();
                    for (int v : comp) names.push_back(g.levels[n].names[v]);
                    comps.push_back(std::move(names));
                }
                e["components"] = std::move(comps);
                levels.push_back(std::move(e));
            }
            res.report["levels"] = std::move(levels);
        } else if (command == "classify" || command == "union") {
            if (command == "union")
                require(cfg.source.kind == SourceSpec::Kind::UnionParts, "InvalidArgument",
                        "union command needs a union source");
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            ClassificationReport rep = classify(g, class_budget(cfg));
            res.report["classification"] = classification_json(rep);
            if (rep.verdict != Verdict::Simple) res.exit_code = 2;
            if (!cfg.out_dot.empty()) {
                std::ofstream out(cfg.out_dot);
                out << export_dot(g);
                res.report["dot"] = cfg.out_dot;
            }
        } else if (command == "incidence") {
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            ClassificationReport rep = classify(g, class_budget(cfg));
            if (rep.verdict != Verdict::Simple) {
                res.report["classification"] = classification_json(rep);
                res.exit_code = 2;
            } else {
                res.report["incidence"] = matrix_json(rep.incidence);
                res.report["u"] = rep.sizes;
                res.report["N"] = rep.alphabet;
                res.report["eigen_ok"] = verify_eigen(rep, rep.alphabet);
            }
        } else if (command == "frobenius") {
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            ClassificationReport rep = classify(g, class_budget(cfg));
            if (rep.verdict != Verdict::Simple) {
                res.report["classification"] = classification_json(rep);
                res.exit_code = 2;
            } else {
                FrobeniusForm form = frobenius_form(rep.incidence);
                ojson f;
                f["permutation"] = form.permutation;
                ojson blocks = ojson::array();
                for (std::size_t b = 0; b < form.blocks.size(); ++b) {
                    ojson e;
                    e["classes"] = form.blocks[b];
                    e["kind"] = form.kinds[b] == BlockKind::Zero          ? "zero"
                                : form.kinds[b] == BlockKind::Primitive   ? "primitive"
                                                                          : "irreducible";
                    blocks.push_back(std::move(e));
                }
                f["blocks"] = std::move(blocks);
                f["permuted"] = matrix_json(form.permuted);
                res.report["incidence"] = matrix_json(rep.incidence);
                res.report["frobenius"] = std::move(f);
                auto [ell, lform] = lemma41_exponent(rep.incidence);
                ojson l;
                l["exponent"] = ell;
                l["all_primitive_or_zero"] = lform.all_primitive_or_zero();
                res.report["lemma41"] = std::move(l);
            }
        } else if (command == "rearrange") {
            const nlohmann::json& r = cfg.rearrange;
            require(r.is_object(), "InvalidArgument", "config needs a \"rearrange\" block");
            std::string mode = r.value("mode", "strict");
            std::vector<long long> u;
            for (const auto& x : r.at("u")) u.push_back(x.get<long long>());
            if (mode == "strict" || mode == "quasi") {
                RearrangeInstance inst;
                for (const auto& x : r.at("a")) inst.a.push_back(BigInt(x.get<std::int64_t>()));
                inst.u = u;
                inst.target = BigInt(r.at("N").get<long long>());
                inst.p = r.at("p").get<long long>();
                auto C = mode == "strict" ? solve_rearrange(inst) : solve_quasi(inst);
                if (!C) {
                    res.report["verdict"] = "infeasible";
                    res.exit_code = 2;
                } else {
                    res.report["verdict"] = "feasible";
                    res.report["C"] = matrix_json(C->rows);
                }
            } else if (mode == "lemma32") {
                IntVec a;
                for (const auto& x : r.at("a")) a.push_back(BigInt(x.get<std::int64_t>()));
                auto chk = lemma32_check(a, u, BigInt(r.at("N").get<long long>()));
                res.report["gcd_divides"] = chk.gcd_divides;
                res.report["threshold_holds"] = chk.threshold_holds;
                res.report["p"] = (std::int64_t)chk.p;
            } else if (mode == "power" || mode == "cor34") {
                IntMat A = matrix_from_json(r.at("matrix"), "matrix");
                long long N = r.at("N").get<long long>();
                auto pr = mode == "power" ? power_rearrange(A, u, N, cfg.budgets.k)
                                          : cor34_rearrange(A, u, N, cfg.budgets.k);
                if (!pr) {
                    res.report["verdict"] = "not-found";
                    res.exit_code = 2;
                } else {
                    res.report["verdict"] = "found";
                    res.report["k"] = pr->k;
                    res.report["target"] = pr->target.str();
                    ojson rows = ojson::array();
                    for (const auto& C : pr->rows) rows.push_back(matrix_json(C.rows));
                    res.report["C"] = std::move(rows);
                }
            } else if (mode == "quasi-power") {
                IntMat A = matrix_from_json(r.at("matrix"), "matrix");
                long long N = r.at("N").get<long long>();
                auto qr = quasi_power_rearrange(A, u, N, cfg.budgets.n, cfg.budgets.k);
                if (!qr) {
                    res.report["verdict"] = "not-found";
                    res.exit_code = 2;
                } else {
                    res.report["verdict"] = "found";
                    res.report["n"] = qr->n;
                    res.report["k"] = qr->k;
                    res.report["bordered"] = matrix_json(qr->bordered);
                    res.report["target"] = qr->target.str();
                    ojson rows = ojson::array();
                    for (const auto& C : qr->rows) rows.push_back(matrix_json(C.rows));
                    res.report["C"] = std::move(rows);
                }
            } else {
                fail("InvalidArgument", "unknown rearrange mode \"" + mode + "\"");
            }
        } else if (command == "verify") {
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            ojson checks;
            bool all_ok = true;

            bool closure_ok = !g.closure_violation().has_value();
            checks["closure"] = closure_ok;
            all_ok = all_ok && closure_ok;

            GraphMetrics m(g);
            int bfs_depth = std::min(g.depth, 5);
            bool geo_ok = true;
            for (int n = 0; n <= bfs_depth && geo_ok; ++n)
                for (int i = 0; i < g.level_size(n) && geo_ok; ++i) {
                    auto bfs = m.bfs_distances({n, i});
                    for (int n2 = 0; n2 <= bfs_depth && geo_ok; ++n2)
                        for (int i2 = 0; i2 < g.level_size(n2); ++i2)
                            if (m.distance({n, i}, {n2, i2}) != bfs[n2][i2]) {
                                geo_ok = false;
                                break;
                            }
                }
            checks["geodesic_vs_bfs"] = geo_ok;
            all_ok = all_ok && geo_ok;

            SandwichResult sw = gromov_sandwich_check(g, g.depth);
            checks["gromov_sandwich"] = sw.holds;
            checks["sandwich_k"] = sw.k;
            all_ok = all_ok && sw.holds;

            if (g.system) {
                auto m1 = condition_h_margin(*g.system, std::max(1, g.depth - 1));
                auto m2 = condition_h_margin(*g.system, g.depth);
                bool margin_ok = m1.has_value() == m2.has_value() &&
                                 (!m1 || *m1 == *m2) && (!m2 || *m2 > 0);
                checks["condition_h_stable"] = margin_ok;
                checks["condition_h_margin"] =
                    m2 ? ojson(rat_to_string(*m2)) : ojson("infinity");
                all_ok = all_ok && margin_ok;
            }

            ClassificationReport rep = classify(g, class_budget(cfg));
            if (rep.verdict == Verdict::Simple) {
                bool eig = verify_eigen(rep, rep.alphabet);
                checks["eigen"] = eig;
                all_ok = all_ok && eig;
            } else {
                checks["classification"] = "inconclusive";
            }
            res.report["checks"] = std::move(checks);
            res.report["ok"] = all_ok;
            if (!all_ok) res.exit_code = 2;
        } else if (command == "near-isometry") {
            std::string mode = cfg.near_isometry.is_object()
                                   ? cfg.near_isometry.value("mode", "general")
                                   : "general";
            if (mode == "union") {
                int copies = cfg.near_isometry.value("copies", 2);
                int alphabet = cfg.near_isometry.value("alphabet", 3);
                LeveledGraph target = build_target_graph(copies, 1, alphabet, cfg.depth);
                SigmaMap sigma = sigma_union(target);
                verify_distortion(sigma, sigma.domain.depth, cfg.budgets.pair);
                res.report["mode"] = "union";
                res.report["copies"] = copies;
                res.report["sigma"] = sigma_json(sigma);
            } else if (mode == "primitive") {
                LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
                std::string member = cfg.near_isometry.value("component", "");
                require(!member.empty(), "InvalidArgument",
                        "primitive mode needs \"component\": a member word");
                auto v = g.find_vertex(member);
                require(v.has_value(), "InvalidArgument", "component word not in graph");
                auto comps = components(g, v->level);
                std::vector<int> members;
                for (const auto& comp : comps)
                    if (std::find(comp.begin(), comp.end(), v->index) != comp.end())
                        members = comp;
                SigmaMap sigma = sigma_primitive(g, v->level, members, cfg.depth, cfg.budgets.k);
                verify_distortion(sigma, sigma.domain.depth, cfg.budgets.pair);
                res.report["mode"] = "primitive";
                res.report["sigma"] = sigma_json(sigma);
            } else {
                LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
                ClassificationReport rep = classify(g, class_budget(cfg));
                if (rep.verdict != Verdict::Simple) {
                    res.report["classification"] = classification_json(rep);
                    res.exit_code = 2;
                } else {
                    SigmaMap sigma = sigma_general(g, rep, cfg.depth);
                    verify_distortion(sigma, sigma.domain.depth, cfg.budgets.pair);
                    res.report["mode"] = "general";
                    res.report["sigma"] = sigma_json(sigma);
                }
            }
        } else if (command == "cantor-union") {
            return cmd_cantor_union(cfg);
        } else if (command == "telescope") {
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            LeveledGraph t = telescope(g, cfg.telescope_k);
            res.report["k"] = cfg.telescope_k;
            res.report["graph"] = graph_summary(t);
            ClassificationReport rep = classify(t, t.depth - 2);
            res.report["classification"] = classification_json(rep);
            if (rep.verdict != Verdict::Simple) res.exit_code = 2;
        } else if (command == "export-dot") {
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            std::string path = cfg.out_dot.empty() ? "graph.dot" : cfg.out_dot;
            std::ofstream out(path);
            std::string dot = export_dot(g);
            out << dot;
            res.report["written"] = path;
            int verts = 0, hedges = 0;
            for (int n = 0; n <= g.depth; ++n) {
                verts += g.level_size(n);
                hedges += (int)g.levels[n].hedges.size();
            }
            res.report["vertices"] = verts;
            res.report["hedges"] = hedges;
        } else {
            fail("InvalidArgument", "unknown command \"" + command + "\"");
        }
    } catch (const Error& e) {
        res.report["error"] = {{"code", e.code()}, {"message", e.what()}};
        res.exit_code = 1;
    } catch (const std::exception& e) {
        res.report["error"] = {{"code", "InternalError"}, {"message", e.what()}};
        res.exit_code = 1;
    }
    return res;
}

namespace {

CommandResult cmd_cantor_union(const JobConfig& cfg) {
    CommandResult res;
    res.report["schema"] = "1";
    res.report["command"] = "cantor-union";
    try {
        require(cfg.has_source && cfg.source.kind == SourceSpec::Kind::CantorUnion,
                "InvalidArgument", "cantor-union needs a cantor-union source with alpha");
        const Rational& alpha = cfg.source.alpha;
        res.report["alpha"] = rat_to_string(alpha);

        auto classify_union_at_one = [&](int depth) {
            auto base = cantor_system();
            auto shifted = std::make_shared<SimilitudeSystem>(
                translate_system(*base, RatVec{Rational(1)}));
            LeveledGraph a = build_from_ifs(base, depth - 1, cfg.budgets.refine);
            LeveledGraph b = build_from_ifs(shifted, depth - 1, cfg.budgets.refine);
            LeveledGraph u = union_graphs({&a, &b}, depth, cfg.budgets.refine);
            return classify(u, depth - 2);
        };

        if (alpha > 1) {
            res.report["regime"] = "disjoint";
            LeveledGraph g = build_source(cfg.source, cfg.depth, cfg.budgets.refine);
            int cross = 0;
            for (int n = 0; n <= g.depth; ++n) cross += (int)g.levels[n].hedges.size();
            res.report["cross_edges"] = cross;
            ClassificationReport rep = classify(g, class_budget(cfg));
            res.report["classification"] = classification_json(rep);
            if (rep.verdict != Verdict::Simple) res.exit_code = 2;
        } else if (alpha == 1) {
            res.report["regime"] = "touching";
            ClassificationReport rep = classify_union_at_one(cfg.depth);
            res.report["classification"] = classification_json(rep);
            if (rep.verdict != Verdict::Simple) res.exit_code = 2;
        } else {
            SignedTernary exp = signed_ternary_expand(alpha);
            ojson ej;
            ej["preperiod"] = exp.preperiod;
            ej["period"] = exp.period;
            ej["dual"] = exp.dual;
            res.report["expansion"] = std::move(ej);
            if (exp.dual) {
                // alpha = odd / 3^k; rescaling by 3^{k+1} splits the union into
                // plain translates plus touching pairs handled by the alpha = 1 case
                res.report["regime"] = "two-expansions";
                BigInt den = rat_den(alpha);
                int k = 0;
                while (den > 1) {
                    den /= 3;
                    ++k;
                }
                res.report["scale_exponent"] = k + 1;
                BigInt pow3 = 1;
                for (int i = 0; i <= k; ++i) pow3 *= 3;
                Rational scaled = alpha * Rational(pow3);
                // digit sums D_{k+1} = {0,2} + 3{0,2} + ... + 3^k {0,2}
                std::vector<BigInt> digit_sums{0};
                BigInt p = 1;
                for (int i = 0; i <= k; ++i) {
                    std::vector<BigInt> next;
                    for (const auto& d : digit_sums) {
                        next.push_back(d);
                        next.push_back(d + 2 * p);
                    }
                    digit_sums = std::move(next);
                    p *= 3;
                }
                long long translates = 0, touching = 0;
                for (const auto& d : digit_sums)
                    for (const auto& dp : digit_sums) {
                        Rational v = Rational(d - dp) + scaled;
                        Rational av = rat_abs(v);
                        if (av == 1)
                            ++touching;
                        else
                            ++translates;
                    }
                res.report["pieces"] = {{"translates", translates}, {"touching_pairs", touching}};
                ClassificationReport rep = classify_union_at_one(cfg.depth);
                res.report["touching_classification"] = classification_json(rep);
                if (rep.verdict != Verdict::Simple) res.exit_code = 2;
            } else {
                res.report["regime"] = "unique-expansion";
                LeveledGraph g = build_alpha_rule(exp, cfg.depth);
                ClassificationReport rep = classify(g, class_budget(cfg));
                res.report["classification"] = classification_json(rep);
                if (rep.verdict != Verdict::Simple) res.exit_code = 2;
            }
        }
    } catch (const Error& e) {
        res.report["error"] = {{"code", e.code()}, {"message", e.what()}};
        res.exit_code = 1;
    } catch (const std::exception& e) {
        res.report["error"] = {{"code", "InternalError"}, {"message", e.what()}};
        res.exit_code = 1;
    }
    return res;
}

} // namespace

} // namespace hyperlip
