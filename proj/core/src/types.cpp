#include "swelabel/types.hpp"

namespace swelabel {

const char* to_string(Task task) {
    switch (task) {
        case Task::Ica: return "ica";
        case Task::Tca: return "tca";
        case Task::Difficulty: return "difficulty";
    }
    return "?";
}

Task task_from_string(const std::string& name) {
    if (name == "ica") return Task::Ica;
    if (name == "tca") return Task::Tca;
    if (name == "difficulty") return Task::Difficulty;
    throw Error(ErrorKind::ConfigError, "unknown task: " + name);
}

std::string binary_label_name(Task task, BinaryLabel label) {
    switch (task) {
        case Task::Ica:
            return label == BinaryLabel::Positive ? "well_specified" : "underspecified";
        case Task::Tca:
            return label == BinaryLabel::Positive ? "adequate" : "inadequate";
        case Task::Difficulty:
            // Difficulty has no binary discretization; callers should not ask.
            return label == BinaryLabel::Positive ? "low_effort" : "high_effort";
    }
    return "?";
}

std::optional<BinaryLabel> binary_label_from_name(const std::string& name) {
    if (name == "well_specified" || name == "adequate" || name == "low_effort")
        return BinaryLabel::Positive;
    if (name == "underspecified" || name == "inadequate" || name == "high_effort")
        return BinaryLabel::Negative;
    return std::nullopt;
}

const char* to_string(ConsensusRule rule) {
    return rule == ConsensusRule::Majority ? "majority" : "median";
}

const char* to_string(CallKind kind) {
    switch (kind) {
        case CallKind::Completion: return "completion";
        case CallKind::Embedding: return "embedding";
        case CallKind::AuxParse: return "aux_parse";
    }
    return "?";
}

}  // namespace swelabel
