#include "swelabel/preprocess.hpp"

#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swelabel/errors.hpp"
#include "swelabel/util.hpp"

using nlohmann::json;

namespace swelabel::preprocess {

namespace {

std::string replace_all_count(const std::string& text, const std::regex& re,
                              const std::string& replacement, long& count) {
    std::string out;
    out.reserve(text.size());
    auto begin = std::sregex_iterator(text.begin(), text.end(), re);
    auto end = std::sregex_iterator();
    std::size_t last = 0;
    for (auto it = begin; it != end; ++it) {
        const std::smatch& m = *it;
        out.append(text, last, static_cast<std::size_t>(m.position(0)) - last);
        out.append(m.format(replacement));
        last = static_cast<std::size_t>(m.position(0) + m.length(0));
        ++count;
    }
    out.append(text, last, text.size() - last);
    return out;
}

std::string apply_rule(const std::string& text, const StripRule& rule, const std::regex& re,
                       long& count) {
    if (rule.scope == StripRule::Scope::Text) return replace_all_count(text, re, rule.replacement, count);
    std::string out;
    const auto lines = util::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        out += replace_all_count(lines[i], re, rule.replacement, count);
        if (i + 1 < lines.size() || (!text.empty() && text.back() == '\n')) out += '\n';
    }
    return out;
}

// Collapse runs of blank lines, strip trailing spaces, trim the document.
// Not a rule: never counts toward removed_spans.
std::string normalize_whitespace(const std::string& text) {
    std::string out;
    int pending_newlines = 0;
    bool wrote_any = false;
    for (const auto& raw : util::split_lines(text)) {
        std::string line = raw;
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        if (line.empty()) {
            if (wrote_any) pending_newlines = std::min(pending_newlines + 1, 1);
            continue;
        }
        if (wrote_any) {
            out += '\n';
            if (pending_newlines > 0) out += '\n';
        }
        out += line;
        wrote_any = true;
        pending_newlines = 0;
    }
    return out;
}

struct CompiledRule {
    StripRule rule;
    std::regex re;
};

std::vector<CompiledRule> compile(const std::vector<StripRule>& rules) {
    std::vector<CompiledRule> out;
    for (const auto& rule : rules) {
        try {
            out.push_back({rule, std::regex(rule.pattern, std::regex::ECMAScript)});
        } catch (const std::regex_error& e) {
            throw Error(ErrorKind::ConfigError, "bad strip rule '" + rule.name + "': " + e.what());
        }
    }
    return out;
}

std::string clean_text(const std::vector<CompiledRule>& rules, std::string text, long& count) {
    // Run to a fixpoint so that nested markup cannot survive one pass
    // and reappear cleanable on the next.
    for (int pass = 0; pass < 16; ++pass) {
        std::string before = text;
        for (const auto& compiled : rules) text = apply_rule(text, compiled.rule, compiled.re, count);
        if (text == before) break;
    }
    return normalize_whitespace(text);
}

}  // namespace

const std::vector<StripRule>& default_rules() {
    static const std::vector<StripRule> rules = {
        {"html_comment", "<!--[\\s\\S]*?-->", "", StripRule::Scope::Text},
        {"fenced_code", "(?:```+|~~~+)[^\\n]*\\n([\\s\\S]*?)(?:```+|~~~+)", "CODE:\n$1",
         StripRule::Scope::Text},
        {"stray_fence", "^[ \\t]*(?:```+|~~~+)[^\\n]*$", "", StripRule::Scope::Line},
        {"badge_link", "\\[!\\[[^\\]]*\\]\\([^)]*\\)\\]\\([^)]*\\)", "", StripRule::Scope::Text},
        {"image_link", "!\\[[^\\]]*\\]\\([^)]*\\)", "", StripRule::Scope::Text},
        {"md_link", "\\[([^\\]]+)\\]\\(([^)\\s]+)[^)]*\\)", "$1 ($2)", StripRule::Scope::Text},
        {"horizontal_rule", "^[ \\t]*(?:-{3,}|\\*{3,}|_{3,})[ \\t]*$", "", StripRule::Scope::Line},
        {"heading_marker", "^[ \\t]{0,3}#{1,6}[ \\t]+", "", StripRule::Scope::Line},
        {"blockquote_marker", "^[ \\t]{0,3}>[ \\t]?", "", StripRule::Scope::Line},
        {"star_emphasis", "\\*{1,3}([^*\\n]+)\\*{1,3}", "$1", StripRule::Scope::Text},
        {"underscore_emphasis", "_{2,3}([^_\\n]+)_{2,3}", "$1", StripRule::Scope::Text},
        {"strikethrough", "~~([^~\\n]+)~~", "$1", StripRule::Scope::Text},
    };
    return rules;
}

std::vector<StripRule> load_rules(const std::filesystem::path& path) {
    json j = json::parse(util::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_array())
        throw Error(ErrorKind::ConfigError, "strip-rule file must be a JSON array: " + path.string());
    std::vector<StripRule> rules;
    for (const auto& entry : j) {
        StripRule rule;
        rule.name = entry.at("name").get<std::string>();
        rule.pattern = entry.at("pattern").get<std::string>();
        rule.replacement = entry.value("replacement", std::string{});
        rule.scope = entry.value("scope", std::string{"text"}) == "line" ? StripRule::Scope::Line
                                                                         : StripRule::Scope::Text;
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::string rules_hash(const std::vector<StripRule>& rules) {
    std::string blob;
    for (const auto& r : rules) {
        blob += r.name;
        blob += '\x1f';
        blob += r.pattern;
        blob += '\x1f';
        blob += r.replacement;
        blob += '\x1f';
        blob += r.scope == StripRule::Scope::Line ? 'L' : 'T';
        blob += '\x1e';
    }
    return util::hex64(util::fnv1a64(blob));
}

CleanIssue clean_issue(const std::string& title, const std::string& body) {
    return clean_issue(title, body, default_rules());
}

CleanIssue clean_issue(const std::string& title, const std::string& body,
                       const std::vector<StripRule>& rules) {
    const auto compiled = compile(rules);
    CleanIssue issue;
    issue.title = clean_text(compiled, title, issue.removed_spans);
    issue.body = clean_text(compiled, body, issue.removed_spans);
    return issue;
}

}  // namespace swelabel::preprocess
