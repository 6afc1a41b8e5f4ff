#pragma once

#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace restopath::service {

/// Request failure carrying the HTTP status and a stable error code.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int http_status, std::string code, const std::string& message)
        : std::runtime_error(message), http_status_(http_status), code_(std::move(code)) {}
    int http_status() const { return http_status_; }
    const std::string& code() const { return code_; }

private:
    int http_status_;
    std::string code_;
};

/// Scenarios, event logs and runs persisted under one data directory:
///   scenarios/<id>/initial.json, events.jsonl, current.json
///   runs/<id>.json (finished report), runs/<id>.status.json
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path data_dir);
    ~SessionStore();
    SessionStore(const SessionStore&) = delete;
    SessionStore& operator=(const SessionStore&) = delete;

    std::string create_scenario(const std::string& document);
    std::string scenario_document(const std::string& id);
    /// Applies one event and returns the new scenario document. A commit may
    /// name {"run_id", "scheme"} instead of "lines".
    std::string apply_event(const std::string& id, const std::string& event_json);
    std::string event_log(const std::string& id);
    /// Initial document folded with every logged event.
    std::string replay(const std::string& id);

    /// Queues a solve on its own thread; solves of one scenario run one at a time.
    std::string start_solve(const std::string& id, const std::string& request_json);
    std::string run_status(const std::string& run_id);
    /// The report document, byte-identical to `restopath solve --out`.
    std::string run_report(const std::string& run_id);
    void cancel_run(const std::string& run_id);
    /// Blocks until the run leaves the queued/running states.
    void wait_run(const std::string& run_id);

private:
    struct Run {
        std::string id;
        std::string scenario_id;
        std::string status = "queued"; // queued, running, done, failed, cancelled
        int iteration = 0;
        int schemes_found = 0;
        int valid_found = 0;
        int max_schemes = 0;
        double last_objective = 0.0;
        std::string error_code;
        std::string error;
        bool cancel = false;
    };

    struct ScenarioLocks {
        std::mutex write; // event application
        std::mutex solve; // one solve at a time
    };

    std::filesystem::path scenario_dir(const std::string& id) const;
    ScenarioLocks& locks(const std::string& id);
    void require_scenario(const std::string& id) const;
    std::shared_ptr<Run> find_run(const std::string& run_id);
    void execute(std::shared_ptr<Run> run, std::string request_json);
    std::string status_json(const Run& run) const;
    void persist_status(const Run& run);

    std::filesystem::path root_;
    std::mutex mu_; // guards the maps, counters and run fields
    std::condition_variable run_changed_;
    std::map<std::string, std::unique_ptr<ScenarioLocks>> scenario_locks_;
    std::map<std::string, std::shared_ptr<Run>> runs_;
    std::vector<std::thread> workers_;
    int next_scenario_ = 1;
    int next_run_ = 1;
};

} // namespace restopath::service
