#include "swelabel/repomap.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include <nlohmann/json.hpp>

#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::repomap {

namespace {

// ---------------------------------------------------------------------------
// File discovery

std::regex glob_to_regex(const std::string& glob) {
    std::string re;
    for (std::size_t i = 0; i < glob.size(); ++i) {
        char c = glob[i];
        switch (c) {
            case '*':
                if (i + 1 < glob.size() && glob[i + 1] == '*') {
                    re += ".*";
                    ++i;
                } else {
                    re += "[^/]*";
                }
                break;
            case '?': re += "[^/]"; break;
            case '.': case '+': case '(': case ')': case '[': case ']':
            case '{': case '}': case '^': case '$': case '|': case '\\':
                re += '\\';
                re += c;
                break;
            default: re += c;
        }
    }
    return std::regex(re, std::regex::ECMAScript);
}

bool glob_matches(const std::string& glob, const std::string& rel_path) {
    // Globs without a slash match the basename, others the full path.
    std::string subject = rel_path;
    if (glob.find('/') == std::string::npos) {
        std::size_t slash = rel_path.rfind('/');
        subject = slash == std::string::npos ? rel_path : rel_path.substr(slash + 1);
    }
    static std::map<std::string, std::regex> cache;
    static std::mutex cache_mutex;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(glob);
    if (it == cache.end()) it = cache.emplace(glob, glob_to_regex(glob)).first;
    return std::regex_match(subject, it->second);
}

bool looks_binary(const std::string& content) {
    const std::size_t probe = std::min<std::size_t>(content.size(), 8000);
    return content.substr(0, probe).find('\0') != std::string::npos;
}

std::vector<std::string> list_source_files(const Workspace& ws, const ExtractorConfig& cfg) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (!fs::exists(ws.root_path)) return files;

    const std::set<std::string> excluded_dirs(cfg.exclude_dirs.begin(), cfg.exclude_dirs.end());
    fs::recursive_directory_iterator it(ws.root_path, fs::directory_options::skip_permission_denied);
    for (auto end = fs::recursive_directory_iterator(); it != end; ++it) {
        const auto& entry = *it;
        const std::string name = entry.path().filename().string();
        if (entry.is_directory()) {
            if (excluded_dirs.count(name)) it.disable_recursion_pending();
            continue;
        }
        if (!entry.is_regular_file()) continue;
        std::string rel = fs::relative(entry.path(), ws.root_path).generic_string();
        bool included = false;
        for (const auto& glob : cfg.include_globs)
            if (glob_matches(glob, rel)) {
                included = true;
                break;
            }
        if (!included) continue;
        bool excluded = false;
        for (const auto& glob : cfg.exclude_globs)
            if (glob_matches(glob, rel)) {
                excluded = true;
                break;
            }
        if (excluded) continue;
        files.push_back(std::move(rel));
    }
    std::sort(files.begin(), files.end());
    return files;
}

// ---------------------------------------------------------------------------
// Built-in lexer

struct LangRules {
    std::vector<std::regex> def_patterns;  // capture 1 = symbol
    const std::set<std::string>* keywords;
};

const std::set<std::string>& python_keywords() {
    static const std::set<std::string> kw = {
        "False", "None",   "True",  "and",      "as",       "assert", "async", "await",
        "break", "class",  "continue", "def",   "del",      "elif",   "else",  "except",
        "finally", "for",  "from",  "global",   "if",       "import", "in",    "is",
        "lambda", "nonlocal", "not", "or",      "pass",     "raise",  "return", "try",
        "while", "with",   "yield", "self",     "cls"};
    return kw;
}

const std::set<std::string>& c_like_keywords() {
    static const std::set<std::string> kw = {
        "auto",   "break",  "case",   "char",   "const",    "continue", "default", "do",
        "double", "else",   "enum",   "extern", "float",    "for",      "goto",    "if",
        "int",    "long",   "register", "return", "short",  "signed",   "sizeof",  "static",
        "struct", "switch", "typedef", "union", "unsigned", "void",     "volatile", "while",
        "class",  "public", "private", "protected", "template", "typename", "namespace",
        "using",  "new",    "delete", "this",   "true",     "false",    "nullptr", "bool",
        "let",    "var",    "function", "export", "import", "require",  "async",   "await",
        "fn",     "impl",   "pub",    "mut",    "match",    "trait",    "mod",     "func",
        "type",   "interface", "package", "go",  "defer",   "module",   "end",     "then"};
    return kw;
}

const LangRules& rules_for(const std::string& path) {
    auto ext_of = [](const std::string& p) {
        std::size_t dot = p.rfind('.');
        return dot == std::string::npos ? std::string{} : util::to_lower(p.substr(dot));
    };
    static const LangRules python{
        {std::regex(R"(^\s*(?:async\s+)?def\s+([A-Za-z_]\w*))"),
         std::regex(R"(^\s*class\s+([A-Za-z_]\w*))")},
        &python_keywords()};
    static const LangRules js{
        {std::regex(R"(^\s*(?:export\s+)?(?:default\s+)?(?:async\s+)?function\s*\*?\s*([A-Za-z_$]\w*))"),
         std::regex(R"(^\s*(?:export\s+)?class\s+([A-Za-z_$]\w*))"),
         std::regex(R"(^\s*(?:export\s+)?(?:const|let|var)\s+([A-Za-z_$]\w*)\s*=\s*(?:async\s*)?(?:function\b|\())")},
        &c_like_keywords()};
    static const LangRules ruby{
        {std::regex(R"(^\s*def\s+(?:self\.)?([A-Za-z_]\w*[?!]?))"),
         std::regex(R"(^\s*(?:class|module)\s+([A-Za-z_]\w*))")},
        &c_like_keywords()};
    static const LangRules go{
        {std::regex(R"(^func\s+(?:\([^)]*\)\s*)?([A-Za-z_]\w*))"),
         std::regex(R"(^type\s+([A-Za-z_]\w*))")},
        &c_like_keywords()};
    static const LangRules rust{
        {std::regex(R"(^\s*(?:pub(?:\([^)]*\))?\s+)?fn\s+([A-Za-z_]\w*))"),
         std::regex(R"(^\s*(?:pub(?:\([^)]*\))?\s+)?(?:struct|enum|trait)\s+([A-Za-z_]\w*))")},
        &c_like_keywords()};
    static const LangRules c_like{
        {std::regex(R"(^\s*(?:class|struct|enum)\s+([A-Za-z_]\w*))"),
         // Non-indented definition-looking line: type tokens then name(.
         std::regex(R"(^[A-Za-z_][\w:<>,&\s\*]*?[\s\*&]([A-Za-z_]\w*)\s*\([^;]*$)")},
        &c_like_keywords()};

    const std::string ext = ext_of(path);
    if (ext == ".py") return python;
    if (ext == ".js" || ext == ".ts") return js;
    if (ext == ".rb") return ruby;
    if (ext == ".go") return go;
    if (ext == ".rs") return rust;
    return c_like;
}

const std::regex& identifier_regex() {
    static const std::regex re(R"([A-Za-z_]\w*)");
    return re;
}

std::string make_signature(const std::string& line) {
    std::string sig = util::trim(line);
    if (sig.size() > 120) sig = sig.substr(0, 117) + "...";
    return sig;
}

void lex_file(const std::string& rel_path, const std::string& content, std::vector<Tag>& out) {
    const LangRules& rules = rules_for(rel_path);
    const auto lines = util::split_lines(content);

    // (line, symbol) pairs claimed by a definition; the defining occurrence
    // itself is not a reference.
    std::set<std::pair<long, std::string>> def_sites;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const long line_no = static_cast<long>(i) + 1;
        for (const auto& pattern : rules.def_patterns) {
            std::smatch m;
            if (std::regex_search(lines[i], m, pattern)) {
                Tag tag;
                tag.path = rel_path;
                tag.symbol = m[1];
                tag.kind = TagKind::Def;
                tag.line = line_no;
                tag.signature = make_signature(lines[i]);
                def_sites.emplace(line_no, tag.symbol);
                out.push_back(std::move(tag));
                break;
            }
        }
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const long line_no = static_cast<long>(i) + 1;
        auto begin = std::sregex_iterator(lines[i].begin(), lines[i].end(), identifier_regex());
        for (auto it = begin, end = std::sregex_iterator(); it != end; ++it) {
            const std::string ident = it->str();
            if (ident.size() < 2) continue;
            if (rules.keywords->count(ident)) continue;
            if (def_sites.count({line_no, ident})) continue;
            Tag tag;
            tag.path = rel_path;
            tag.symbol = ident;
            tag.kind = TagKind::Ref;
            tag.line = line_no;
            out.push_back(std::move(tag));
        }
    }
}

std::vector<Tag> run_external_tagger(const Workspace& ws, const ExtractorConfig& cfg,
                                     const std::vector<std::string>& files) {
    std::vector<Tag> out;
    for (const auto& rel : files) {
        const auto abs = ws.root_path / rel;
        auto res = util::run_command(cfg.external_tagger + " " + util::shell_quote(abs.string()));
        if (res.exit_code == 127 || res.exit_code < 0)
            throw Error(ErrorKind::ExtractorUnavailable, cfg.external_tagger);
        for (const auto& line : util::split_lines(res.output)) {
            if (util::trim(line).empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("name")) continue;
            Tag tag;
            tag.path = rel;
            tag.symbol = j["name"].get<std::string>();
            tag.line = j.value("line", 1L);
            const std::string kind = j.value("kind", std::string{"def"});
            tag.kind = kind == "ref" ? TagKind::Ref : TagKind::Def;
            tag.signature = j.value("signature", tag.symbol);
            out.push_back(std::move(tag));
        }
        // The external tagger only yields definitions; references still
        // come from the built-in lexer.
        const std::string content = util::read_file(abs);
        if (!looks_binary(content)) {
            std::vector<Tag> lexed;
            lex_file(rel, content, lexed);
            for (auto& tag : lexed)
                if (tag.kind == TagKind::Ref) out.push_back(std::move(tag));
        }
    }
    return out;
}

}  // namespace

std::vector<Tag> extract_tags(const Workspace& workspace, const ExtractorConfig& config) {
    const auto files = list_source_files(workspace, config);
    std::vector<Tag> tags;
    if (!config.external_tagger.empty()) {
        tags = run_external_tagger(workspace, config, files);
    } else {
        for (const auto& rel : files) {
            const std::string content = util::read_file(workspace.root_path / rel);
            if (content.size() > config.max_file_bytes || looks_binary(content)) continue;
            lex_file(rel, content, tags);
        }
    }
    std::sort(tags.begin(), tags.end(), [](const Tag& a, const Tag& b) {
        if (a.path != b.path) return a.path < b.path;
        if (a.line != b.line) return a.line < b.line;
        if (a.kind != b.kind) return a.kind == TagKind::Def;
        return a.symbol < b.symbol;
    });
    return tags;
}

RefGraph build_graph(const std::vector<Tag>& tags) {
    RefGraph graph;
    std::set<std::string> nodes;
    std::map<std::string, std::set<std::string>> def_files;
    std::map<std::pair<std::string, std::string>, long> ref_counts;  // (file, symbol)

    for (const auto& tag : tags) {
        nodes.insert(tag.path);
        if (tag.kind == TagKind::Def) {
            def_files[tag.symbol].insert(tag.path);
            auto& file_defs = graph.defs[tag.path];
            const bool seen = std::any_of(file_defs.begin(), file_defs.end(),
                                          [&](const Tag& t) { return t.symbol == tag.symbol; });
            if (!seen) file_defs.push_back(tag);
        } else {
            ref_counts[{tag.path, tag.symbol}]++;
        }
    }

    graph.nodes.assign(nodes.begin(), nodes.end());
    for (const auto& [symbol, files] : def_files)
        graph.ident_index[symbol] = std::vector<std::string>(files.begin(), files.end());

    for (const auto& [key, count] : ref_counts) {
        const auto& [src, symbol] = key;
        auto it = def_files.find(symbol);
        if (it == def_files.end()) continue;
        const double rarity = 1.0 / std::sqrt(static_cast<double>(it->second.size()));
        const double weight = static_cast<double>(count) * rarity;
        for (const auto& dst : it->second) {
            graph.edges[{src, dst}] += weight;
            graph.incoming[dst][symbol] += weight;
        }
    }
    return graph;
}

RankResult rank(const RefGraph& graph, const std::set<std::string>& focus_files,
                const std::set<std::string>& mentioned_idents, const RankConfig& config) {
    RankResult result;
    const std::size_t n = graph.nodes.size();
    if (n == 0) return result;

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[graph.nodes[i]] = i;

    // Files defining any mentioned identifier attract boosted edges.
    std::set<std::size_t> boosted;
    for (const auto& ident : mentioned_idents) {
        auto it = graph.ident_index.find(ident);
        if (it == graph.ident_index.end()) continue;
        for (const auto& file : it->second) boosted.insert(index.at(file));
    }

    struct Edge {
        std::size_t src, dst;
        double weight;
    };
    std::vector<Edge> edges;
    std::vector<double> out_weight(n, 0.0);
    for (const auto& [key, weight] : graph.edges) {
        Edge e{index.at(key.first), index.at(key.second), weight};
        if (boosted.count(e.dst)) e.weight *= config.mention_boost;
        out_weight[e.src] += e.weight;
        edges.push_back(e);
    }

    std::vector<double> personalization(n, 0.0);
    std::vector<std::size_t> focus_idx;
    for (const auto& file : focus_files) {
        auto it = index.find(file);
        if (it != index.end()) focus_idx.push_back(it->second);
    }
    if (!focus_idx.empty()) {
        for (std::size_t i : focus_idx) personalization[i] = 1.0 / static_cast<double>(focus_idx.size());
    } else {
        std::fill(personalization.begin(), personalization.end(), 1.0 / static_cast<double>(n));
    }

    std::vector<double> ranks(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n, 0.0);
    bool converged = false;
    for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
        std::fill(next.begin(), next.end(), 0.0);
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (out_weight[i] == 0.0) dangling += ranks[i];
        for (const auto& e : edges) next[e.dst] += ranks[e.src] * e.weight / out_weight[e.src];
        double l1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double value = (1.0 - config.damping) * personalization[i] +
                                 config.damping * (next[i] + dangling * personalization[i]);
            l1 += std::fabs(value - ranks[i]);
            next[i] = value;
        }
        ranks.swap(next);
        if (l1 <= config.tolerance) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw Error(ErrorKind::ConvergenceFailure,
                    "pagerank did not reach " + std::to_string(config.tolerance) + " within " +
                        std::to_string(config.max_iterations) + " iterations");

    for (std::size_t i = 0; i < n; ++i) result.file_rank[graph.nodes[i]] = ranks[i];

    // Apportion each file's rank over its definitions by incoming weight.
    for (const auto& [file, defs] : graph.defs) {
        const double file_rank = result.file_rank.at(file);
        double total_in = 0.0;
        const auto in_it = graph.incoming.find(file);
        if (in_it != graph.incoming.end())
            for (const auto& [symbol, w] : in_it->second) total_in += w;
        for (const auto& def : defs) {
            RankedSymbol rs;
            rs.path = def.path;
            rs.symbol = def.symbol;
            rs.line = def.line;
            rs.signature = def.signature;
            double in_w = 0.0;
            if (in_it != graph.incoming.end()) {
                auto w_it = in_it->second.find(def.symbol);
                if (w_it != in_it->second.end()) in_w = w_it->second;
            }
            rs.score = total_in > 0.0 ? file_rank * in_w / total_in : 0.0;
            result.symbols.push_back(std::move(rs));
        }
    }
    std::sort(result.symbols.begin(), result.symbols.end(),
              [](const RankedSymbol& a, const RankedSymbol& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.path != b.path) return a.path < b.path;
                  return a.line < b.line;
              });
    return result;
}

long estimate_tokens(const std::string& text) {
    return static_cast<long>((text.size() + 3) / 4);
}

RepoMapText render_map(const std::vector<RankedSymbol>& ranked_symbols, long budget_tokens,
                       const Tokenizer& tokenizer) {
    const Tokenizer& tok = tokenizer ? tokenizer : Tokenizer(estimate_tokens);
    RepoMapText map;
    map.budget = budget_tokens;
    for (const auto& symbol : ranked_symbols) {
        const std::string block = symbol.path + ":\n  " + symbol.signature + "\n";
        const std::string candidate = map.text + block;
        const long estimate = tok(candidate);
        if (!map.text.empty() && estimate > budget_tokens) break;
        map.text = candidate;
        map.token_estimate = estimate;
        map.included_symbols.push_back(symbol.symbol);
        if (estimate > budget_tokens) break;  // single-block floor, nothing more fits
    }
    return map;
}

std::set<std::string> identifier_tokens(const std::string& text) {
    std::set<std::string> out;
    auto begin = std::sregex_iterator(text.begin(), text.end(), identifier_regex());
    for (auto it = begin, end = std::sregex_iterator(); it != end; ++it) {
        if (it->str().size() >= 2) out.insert(it->str());
    }
    return out;
}

RepoMapBuilder::RepoMapBuilder(ExtractorConfig extractor, RankConfig rank)
    : extractor_(std::move(extractor)), rank_(rank) {}

RepoMapText RepoMapBuilder::build(const Workspace& workspace,
                                  const std::set<std::string>& focus_files,
                                  const std::set<std::string>& mentioned_idents,
                                  long budget_tokens) {
    std::vector<Tag> tags;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        const std::string key = workspace.root_path.string();
        auto it = tag_cache_.find(key);
        if (it == tag_cache_.end()) {
            it = tag_cache_.emplace(key, extract_tags(workspace, extractor_)).first;
            ++extraction_count_;
        }
        tags = it->second;
    }
    const RefGraph graph = build_graph(tags);
    const RankResult ranked = rank(graph, focus_files, mentioned_idents, rank_);
    return render_map(ranked.symbols, budget_tokens);
}

}  // namespace swelabel::repomap
