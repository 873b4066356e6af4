#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "swelabel/types.hpp"

namespace swelabel::repomap {

enum class TagKind { Def, Ref };

struct Tag {
    std::string path;  // repo-relative, '/' separated
    std::string symbol;
    TagKind kind = TagKind::Def;
    long line = 1;          // 1-based
    std::string signature;  // one-line source excerpt, Def only
};

struct ExtractorConfig {
    std::vector<std::string> include_globs = {"*.py", "*.js",  "*.ts", "*.c",  "*.cc", "*.cpp",
                                              "*.h",  "*.hpp", "*.go", "*.rb", "*.rs", "*.java"};
    std::vector<std::string> exclude_globs = {};
    std::vector<std::string> exclude_dirs = {".git",         "node_modules", "vendor",
                                             "build",        "dist",         "__pycache__",
                                             ".tox",         ".venv",        "third_party"};
    std::size_t max_file_bytes = 1 << 20;
    // Optional external tagger command, invoked as "<cmd> <file>" and
    // expected to print JSON lines {"name","line","kind","signature"?}.
    // Empty selects the built-in lexer.
    std::string external_tagger;
};

// Defs and refs over the workspace tree, sorted by (path, line). Binary
// and excluded files are skipped.
std::vector<Tag> extract_tags(const Workspace& workspace, const ExtractorConfig& config = {});

// Directed reference graph: referencing file -> defining file, edge weight
// = reference count x identifier-rarity multiplier 1/sqrt(#defining files).
struct RefGraph {
    std::vector<std::string> nodes;  // sorted
    std::map<std::pair<std::string, std::string>, double> edges;
    std::map<std::string, std::vector<std::string>> ident_index;  // symbol -> defining files
    // Defining file -> symbol -> summed incoming reference weight.
    std::map<std::string, std::map<std::string, double>> incoming;
    // Defining file -> its Def tags (first per symbol, line order).
    std::map<std::string, std::vector<Tag>> defs;
};

RefGraph build_graph(const std::vector<Tag>& tags);

struct RankConfig {
    double damping = 0.85;
    double mention_boost = 10.0;
    int max_iterations = 100;
    double tolerance = 1e-8;  // L1
};

struct RankedSymbol {
    std::string path;
    std::string symbol;
    long line = 1;
    std::string signature;
    double score = 0.0;
};

struct RankResult {
    std::map<std::string, double> file_rank;  // probability distribution
    std::vector<RankedSymbol> symbols;        // score desc, ties by (path, line)
};

// Personalized PageRank over file nodes. Personalization mass concentrates
// uniformly on focus_files when any of them are graph nodes, else it is
// uniform. Edges into files defining a mentioned identifier are boosted
// before ranking. Symbol scores apportion the file's rank by incoming
// reference weight per symbol.
RankResult rank(const RefGraph& graph, const std::set<std::string>& focus_files,
                const std::set<std::string>& mentioned_idents, const RankConfig& config = {});

struct RepoMapText {
    std::string text;
    long token_estimate = 0;
    std::vector<std::string> included_symbols;
    long budget = 0;
};

using Tokenizer = std::function<long(const std::string&)>;

// ceil(bytes/4) unless an exact tokenizer is configured.
long estimate_tokens(const std::string& text);

// Greedy prefix of "path:\n  signature" blocks in rank order while the
// estimate stays within budget; the top block is always included.
RepoMapText render_map(const std::vector<RankedSymbol>& ranked_symbols, long budget_tokens,
                       const Tokenizer& tokenizer = {});

// Identifier tokens of a text (used for mention boosting from issue text).
std::set<std::string> identifier_tokens(const std::string& text);

// Caches tags per workspace root and counts real extractions, so N runs
// over one instance cost exactly one extraction.
class RepoMapBuilder {
public:
    explicit RepoMapBuilder(ExtractorConfig extractor = {}, RankConfig rank = {});

    RepoMapText build(const Workspace& workspace, const std::set<std::string>& focus_files,
                      const std::set<std::string>& mentioned_idents, long budget_tokens);

    long extraction_count() const { return extraction_count_; }

private:
    ExtractorConfig extractor_;
    RankConfig rank_;
    std::mutex mutex_;
    std::map<std::string, std::vector<Tag>> tag_cache_;
    long extraction_count_ = 0;
};

}  // namespace swelabel::repomap
