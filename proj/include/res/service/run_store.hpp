#pragma once

#include "res/core/events.hpp"
#include "res/core/json.hpp"
#include "res/core/types.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace res::service {

/// Append-only persistence for runs and their lifecycle events.
///
/// Storage is one JSON-lines file per UTC day (runs-YYYY-MM-DD.jsonl). Each
/// line is one of
///   {"kind":"started","run_id":...,"query":...,"started_at":...}
///   {"kind":"event","event":{LayerEvent}}
///   {"kind":"run","record":{RunRecord}}
/// The in-memory index is rebuilt from all files at construction; lines that
/// do not parse (a torn final write) are skipped. Appends are serialized and
/// flushed before the call returns. I/O failures throw std::runtime_error.
class RunStore {
public:
    explicit RunStore(std::filesystem::path dir);

    void record_started(const std::string& run_id, const std::string& query, Timestamp started_at);
    void append_event(const LayerEvent& event);
    void record_finished(const RunRecord& record);

    bool contains(const std::string& run_id) const;

    /// Full record JSON for finished runs; {run_id, query, status:"running",
    /// started_at} while in flight.
    std::optional<Json> get(const std::string& run_id) const;

    struct Page {
        std::vector<Json> runs;  // newest first
        std::size_t total = 0;
    };
    Page list(std::size_t limit, std::size_t offset) const;

    std::vector<LayerEvent> events(const std::string& run_id) const;

    /// Blocks until the run has more than `have` events, the run is
    /// unknown, close() was called, or the timeout expires. Returns the events
    /// past `have` (possibly none).
    std::vector<LayerEvent> wait_events(const std::string& run_id, std::size_t have,
                                        std::chrono::milliseconds timeout) const;

    /// Wakes all waiters; later waits return immediately.
    void close();

    std::size_t size() const;
    const std::filesystem::path& directory() const { return dir_; }

private:
    struct Entry {
        std::string query;
        Timestamp started_at{};
        std::optional<RunRecord> record;
        std::vector<LayerEvent> events;
    };

    void append_line(const Json& line);
    void apply(const Json& line);
    Entry& entry_for(const std::string& run_id);

    std::filesystem::path dir_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    bool closed_ = false;
    std::map<std::string, Entry> runs_;
    std::vector<std::string> order_;  // first appearance
    std::string open_day_;
    std::ofstream out_;
};

}  // namespace res::service
