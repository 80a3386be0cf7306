#include "hyperlip/config.hpp"

namespace hyperlip {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& message) {
    fail("ParseError", "at " + (path.empty() ? std::string("/") : path) + ": " + message);
}

Rational rational_at(const json& j, const std::string& path) {
    if (j.is_number_integer()) return Rational(BigInt((long long)j.get<std::int64_t>()));
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const Error& e) {
            parse_fail(path, e.what());
        }
    }
    if (j.is_number_float())
        parse_fail(path, "rational required; floats are not accepted (got " + j.dump() + ")");
    parse_fail(path, "expected a rational as \"p/q\" string or integer");
}

SourceSpec parse_source(const json& j, const std::string& path);

std::shared_ptr<const SimilitudeSystem> parse_ifs(const json& j, const std::string& path) {
    int dim = 1;
    if (j.contains("dimension")) {
        if (!j["dimension"].is_number_integer())
            parse_fail(path + "/dimension", "integer required");
        dim = j["dimension"].get<int>();
    }
    if (!j.contains("ratio")) parse_fail(path, "missing \"ratio\"");
    Rational ratio = rational_at(j["ratio"], path + "/ratio");

    if (!j.contains("maps") || !j["maps"].is_array())
        parse_fail(path, "missing \"maps\" array");
    const json& maps = j["maps"];
    if (maps.size() < 2) parse_fail(path + "/maps", "at least 2 maps required");

    std::vector<std::pair<RatMat, RatVec>> data;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        std::string mp = path + "/maps/" + std::to_string(i);
        const json& entry = maps[i];
        if (!entry.is_object()) parse_fail(mp, "map object required");
        RatMat rot;
        if (entry.contains("rotation")) {
            const json& r = entry["rotation"];
            if (!r.is_array()) parse_fail(mp + "/rotation", "matrix required");
            for (std::size_t a = 0; a < r.size(); ++a) {
                RatVec row;
                const json& jr = r[a];
                if (!jr.is_array()) parse_fail(mp + "/rotation", "matrix rows required");
                for (std::size_t b = 0; b < jr.size(); ++b)
                    row.push_back(rational_at(jr[b], mp + "/rotation/" + std::to_string(a) +
                                                          "/" + std::to_string(b)));
                rot.push_back(std::move(row));
            }
        } else {
            rot = mat_identity_q(dim);
        }
        if ((int)rot.size() != dim) parse_fail(mp + "/rotation", "dimension mismatch");
        if (!mat_is_orthogonal_q(rot))
            parse_fail(mp + "/rotation", "rational orthogonal required");

        if (!entry.contains("translation")) parse_fail(mp, "missing \"translation\"");
        const json& t = entry["translation"];
        if (!t.is_array() || (int)t.size() != dim)
            parse_fail(mp + "/translation", "vector of dimension " + std::to_string(dim) +
                                                " required");
        RatVec trans;
        for (std::size_t a = 0; a < t.size(); ++a)
            trans.push_back(rational_at(t[a], mp + "/translation/" + std::to_string(a)));
        data.emplace_back(std::move(rot), std::move(trans));
    }

    std::optional<Box> box;
    if (j.contains("invariant_box")) {
        const json& b = j["invariant_box"];
        if (!b.is_object() || !b.contains("lo") || !b.contains("hi"))
            parse_fail(path + "/invariant_box", "object with \"lo\" and \"hi\" required");
        Box bx;
        for (std::size_t a = 0; a < b["lo"].size(); ++a)
            bx.lo.push_back(rational_at(b["lo"][a], path + "/invariant_box/lo"));
        for (std::size_t a = 0; a < b["hi"].size(); ++a)
            bx.hi.push_back(rational_at(b["hi"][a], path + "/invariant_box/hi"));
        box = std::move(bx);
    }
    try {
        return std::make_shared<SimilitudeSystem>(
            SimilitudeSystem::create(dim, ratio, std::move(data), std::move(box)));
    } catch (const Error& e) {
        parse_fail(path, e.what());
    }
}

SourceSpec parse_source(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type")) parse_fail(path, "source object with \"type\" required");
    std::string type = j["type"].get<std::string>();
    SourceSpec spec;
    if (type == "ifs") {
        spec.kind = SourceSpec::Kind::Ifs;
        spec.system = parse_ifs(j, path);
        spec.alphabet = spec.system->branching();
    } else if (type == "explicit") {
        spec.kind = SourceSpec::Kind::Explicit;
        if (!j.contains("alphabet") || !j["alphabet"].is_number_integer())
            parse_fail(path, "explicit source needs \"alphabet\"");
        spec.alphabet = j["alphabet"].get<int>();
        if (j.contains("edges")) {
            const json& edges = j["edges"];
            if (!edges.is_array()) parse_fail(path + "/edges", "array required");
            for (std::size_t i = 0; i < edges.size(); ++i) {
                const json& e = edges[i];
                if (!e.is_array() || e.size() != 2)
                    parse_fail(path + "/edges/" + std::to_string(i), "pair of words required");
                try {
                    spec.edges.emplace_back(
                        name_to_word(e[0].get<std::string>(), spec.alphabet),
                        name_to_word(e[1].get<std::string>(), spec.alphabet));
                } catch (const Error& err) {
                    parse_fail(path + "/edges/" + std::to_string(i), err.what());
                }
            }
        }
    } else if (type == "ladder") {
        spec.kind = SourceSpec::Kind::Ladder;
        spec.alphabet = 2;
        if (!j.contains("levels") || !j["levels"].is_array())
            parse_fail(path, "ladder source needs \"levels\"");
        for (const auto& x : j["levels"]) {
            if (!x.is_number_integer()) parse_fail(path + "/levels", "integers required");
            spec.rungs.push_back(x.get<int>());
        }
    } else if (type == "union") {
        spec.kind = SourceSpec::Kind::UnionParts;
        if (!j.contains("parts") || !j["parts"].is_array() || j["parts"].size() < 2)
            parse_fail(path, "union source needs at least two \"parts\"");
        for (std::size_t i = 0; i < j["parts"].size(); ++i)
            spec.parts.push_back(parse_source(j["parts"][i], path + "/parts/" + std::to_string(i)));
    } else if (type == "cantor-union") {
        spec.kind = SourceSpec::Kind::CantorUnion;
        if (!j.contains("alpha")) parse_fail(path, "cantor-union source needs \"alpha\"");
        spec.alpha = rational_at(j["alpha"], path + "/alpha");
        if (spec.alpha <= 0) parse_fail(path + "/alpha", "alpha must be positive");
        spec.alphabet = 2;
    } else {
        parse_fail(path + "/type", "unknown source type \"" + type + "\"");
    }
    return spec;
}

} // namespace

JobConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // convert byte offset to line/column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail("ParseError", "line " + std::to_string(line) + ", column " + std::to_string(col) +
                               ": " + e.what());
    }
    if (!j.is_object()) fail("ParseError", "top-level object required");

    JobConfig cfg;
    if (j.contains("source")) {
        cfg.source = parse_source(j["source"], "/source");
        cfg.has_source = true;
    }
    if (j.contains("depth")) {
        if (!j["depth"].is_number_integer() || j["depth"].get<int>() < 1)
            parse_fail("/depth", "positive integer required");
        cfg.depth = j["depth"].get<int>();
    }
    if (j.contains("budgets")) {
        const json& b = j["budgets"];
        if (!b.is_object()) parse_fail("/budgets", "object required");
        if (b.contains("refine")) cfg.budgets.refine = b["refine"].get<int>();
        if (b.contains("class")) cfg.budgets.cls = b["class"].get<int>();
        if (b.contains("k")) cfg.budgets.k = b["k"].get<long long>();
        if (b.contains("n")) cfg.budgets.n = b["n"].get<long long>();
        if (b.contains("pair")) cfg.budgets.pair = b["pair"].get<long long>();
    }
    if (j.contains("metric_a")) {
        if (!j["metric_a"].is_number()) parse_fail("/metric_a", "number required");
        cfg.metric_a = j["metric_a"].get<double>();
        if (cfg.metric_a <= 0) parse_fail("/metric_a", "positive value required");
    }
    if (j.contains("telescope_k")) cfg.telescope_k = j["telescope_k"].get<int>();
    if (j.contains("rearrange")) cfg.rearrange = j["rearrange"];
    if (j.contains("near_isometry")) cfg.near_isometry = j["near_isometry"];
    if (j.contains("output")) {
        const json& o = j["output"];
        if (o.contains("report")) cfg.out_report = o["report"].get<std::string>();
        if (o.contains("dot")) cfg.out_dot = o["dot"].get<std::string>();
    }
    return cfg;
}

std::shared_ptr<const SimilitudeSystem> cantor_system() {
    RatMat id1 = mat_identity_q(1);
    std::vector<std::pair<RatMat, RatVec>> maps{
        {id1, RatVec{Rational(0)}},
        {id1, RatVec{Rational(2, 3)}},
    };
    return std::make_shared<SimilitudeSystem>(
        SimilitudeSystem::create(1, Rational(1, 3), std::move(maps)));
}

LeveledGraph build_source(const SourceSpec& spec, int depth, int refine_budget) {
    switch (spec.kind) {
        case SourceSpec::Kind::Ifs:
            return build_from_ifs(spec.system, depth, refine_budget);
        case SourceSpec::Kind::Explicit: {
            LeveledGraph g = build_explicit(spec.alphabet, depth, spec.edges);
            return g;
        }
        case SourceSpec::Kind::Ladder:
            return build_ladder(depth, spec.rungs);
        case SourceSpec::Kind::UnionParts: {
            std::vector<LeveledGraph> built;
            built.reserve(spec.parts.size());
            for (const auto& part : spec.parts)
                built.push_back(build_source(part, depth - 1, refine_budget));
            std::vector<const LeveledGraph*> ptrs;
            for (const auto& g : built) ptrs.push_back(&g);
            return union_graphs(ptrs, depth, refine_budget);
        }
        case SourceSpec::Kind::CantorUnion: {
            if (spec.alpha >= 1) {
                auto base = cantor_system();
                auto shifted = std::make_shared<SimilitudeSystem>(
                    translate_system(*base, RatVec{spec.alpha}));
                LeveledGraph a = build_from_ifs(base, depth - 1, refine_budget);
                LeveledGraph b = build_from_ifs(shifted, depth - 1, refine_budget);
                return union_graphs({&a, &b}, depth, refine_budget);
            }
            SignedTernary exp = signed_ternary_expand(spec.alpha);
            require(!exp.dual, "DualExpansionNotSupported",
                    "alpha has two expansions; the cantor-union command handles the "
                    "decomposition");
            return build_alpha_rule(exp, depth);
        }
    }
    fail("InternalError", "unhandled source kind");
}

} // namespace hyperlip
