#include "swelabel/workspace.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "swelabel/util.hpp"

namespace swelabel::workspace {

namespace {

// Checkout of one cache slot at a time; other slots proceed in parallel.
std::mutex& slot_mutex(const std::string& key) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::unique_ptr<std::mutex>> registry;
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto& slot = registry[key];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

// "owner/name" -> "owner__name"; absolute paths flatten the same way.
std::string sanitize_repo(const std::string& repo) {
    std::string out;
    for (char c : repo) {
        if (c == '/')
            out += "__";
        else
            out += c;
    }
    return out;
}

std::string resolve_source(const Instance& instance, const GitConfig& config) {
    // A repo field that is itself a reachable local path wins.
    if (std::filesystem::exists(instance.repo)) return instance.repo;
    if (!config.mirror_dir.empty()) {
        const auto flat = config.mirror_dir / sanitize_repo(instance.repo);
        if (std::filesystem::exists(flat)) return flat.string();
        const auto nested = config.mirror_dir / instance.repo;
        if (std::filesystem::exists(nested)) return nested.string();
    }
    std::string url = config.url_template;
    const std::string token = "{repo}";
    std::size_t pos = url.find(token);
    if (pos != std::string::npos) url.replace(pos, token.size(), instance.repo);
    return url;
}

}  // namespace

GitResult run_git(const std::vector<std::string>& args, const std::filesystem::path& cwd) {
    std::string cmd = "git";
    if (!cwd.empty()) cmd += " -C " + util::shell_quote(cwd.string());
    for (const auto& arg : args) cmd += " " + util::shell_quote(arg);
    auto res = util::run_command(cmd);
    return GitResult{res.exit_code, std::move(res.output)};
}

Workspace checkout_workspace(const Instance& instance, const GitConfig& config) {
    if (instance.repo.empty())
        throw Error(ErrorKind::RepoUnavailable, "instance has no repo: " + instance.instance_id);
    if (instance.base_commit.empty())
        throw Error(ErrorKind::CommitNotFound, "instance has no base_commit: " + instance.instance_id);

    const auto slot =
        config.cache_dir / sanitize_repo(instance.repo) / instance.base_commit;
    std::lock_guard<std::mutex> lock(slot_mutex(slot.string()));

    Workspace ws;
    ws.repo = instance.repo;
    ws.root_path = slot;

    if (std::filesystem::exists(slot / ".git")) {
        auto head = run_git({"rev-parse", "HEAD"}, slot);
        if (head.exit_code == 0 &&
            util::starts_with(util::trim(head.output), instance.base_commit)) {
            ws.checked_out_commit = util::trim(head.output);
            return ws;  // cache hit, no re-clone
        }
        std::filesystem::remove_all(slot);  // stale or broken slot
    }

    std::filesystem::create_directories(slot.parent_path());
    const std::string source = resolve_source(instance, config);
    auto clone = run_git({"clone", "--quiet", "--no-checkout", source, slot.string()});
    if (clone.exit_code != 0) {
        std::filesystem::remove_all(slot);
        throw Error(ErrorKind::RepoUnavailable, instance.repo + ": " + util::trim(clone.output));
    }

    auto checkout = run_git({"checkout", "--quiet", "--detach", instance.base_commit}, slot);
    if (checkout.exit_code != 0) {
        std::filesystem::remove_all(slot);
        throw Error(ErrorKind::CommitNotFound,
                    instance.base_commit + " in " + instance.repo + ": " + util::trim(checkout.output));
    }

    auto head = run_git({"rev-parse", "HEAD"}, slot);
    ws.checked_out_commit = util::trim(head.output);
    return ws;
}

Workspace from_dir(const std::filesystem::path& root) {
    Workspace ws;
    ws.root_path = root;
    ws.repo = root.filename().string();
    return ws;
}

bool is_clean(const Workspace& ws) {
    if (!std::filesystem::exists(ws.root_path / ".git")) return true;
    auto status = run_git({"status", "--porcelain"}, ws.root_path);
    return status.exit_code == 0 && util::trim(status.output).empty();
}

}  // namespace swelabel::workspace
