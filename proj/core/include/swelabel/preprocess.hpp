#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace swelabel::preprocess {

// One markdown-stripping rule. Text-scope patterns run against the whole
// document (may span lines); line-scope patterns run per line. The
// replacement supports $1-style capture references; empty means drop.
struct StripRule {
    std::string name;
    std::string pattern;
    std::string replacement;
    enum class Scope { Text, Line } scope = Scope::Text;
};

struct CleanIssue {
    std::string title;
    std::string body;
    long removed_spans = 0;
};

// The default rule set: HTML comments, badge/image links, fenced-code
// fences (inner text kept under a CODE: line), horizontal rules, heading
// markers, blockquote markers, emphasis markers. Bare URLs and inline
// backticks survive. Versioned via rules_hash().
const std::vector<StripRule>& default_rules();

std::vector<StripRule> load_rules(const std::filesystem::path& path);

std::string rules_hash(const std::vector<StripRule>& rules);

// Deterministic and idempotent: the rule pipeline runs to a fixpoint and
// whitespace collapses to single blank lines.
CleanIssue clean_issue(const std::string& title, const std::string& body);
CleanIssue clean_issue(const std::string& title, const std::string& body,
                       const std::vector<StripRule>& rules);

}  // namespace swelabel::preprocess
