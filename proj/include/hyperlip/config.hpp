#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperlip/augtree.hpp"

namespace hyperlip {

struct Budgets {
    int refine = 12;
    int cls = -1; // default depth - 2
    long long k = 6;
    long long n = 8;
    long long pair = 4000000;
};

struct SourceSpec {
    enum class Kind { Ifs, Explicit, Ladder, UnionParts, CantorUnion };
    Kind kind = Kind::Explicit;

    std::shared_ptr<const SimilitudeSystem> system; // Ifs
    int alphabet = 2;
    std::vector<std::pair<Word, Word>> edges; // Explicit
    std::vector<int> rungs;                   // Ladder
    std::vector<SourceSpec> parts;            // UnionParts
    Rational alpha;                           // CantorUnion
};

struct JobConfig {
    bool has_source = false;
    SourceSpec source;
    int depth = 4;
    Budgets budgets;
    double metric_a = 1.0;
    int telescope_k = 2;
    nlohmann::json rearrange;      // command-specific block, kept verbatim
    nlohmann::json near_isometry;  // command-specific block, kept verbatim
    std::string out_report;
    std::string out_dot;
};

// Parses and validates a JSON job description. Syntax errors carry
// line/column positions; semantic errors carry the JSON pointer path.
JobConfig parse_config(const std::string& text);

// Builds the configured graph (cantor-union sources route through the
// signed expansion; a two-expansion alpha is rejected here).
LeveledGraph build_source(const SourceSpec& spec, int depth, int refine_budget);

// The standard middle-third Cantor system {x/3, (x+2)/3} on [0,1].
std::shared_ptr<const SimilitudeSystem> cantor_system();

} // namespace hyperlip
