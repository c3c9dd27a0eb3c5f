#include "res/service/run_store.hpp"

#include <algorithm>
#include <ctime>
#include <stdexcept>

namespace res::service {

namespace {

std::string utc_day(Timestamp t) {
    const std::time_t raw = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&raw, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

}  // namespace

RunStore::RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create store directory " + dir_.string() + ": " + ec.message());

    std::vector<std::filesystem::path> files;
    for (const auto& item : std::filesystem::directory_iterator(dir_)) {
        const auto name = item.path().filename().string();
        if (item.is_regular_file() && name.starts_with("runs-") && name.ends_with(".jsonl")) {
            files.push_back(item.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                apply(Json::parse(line));
            } catch (const std::exception&) {
                // Torn or foreign line.
            }
        }
    }
}

RunStore::Entry& RunStore::entry_for(const std::string& run_id) {
    auto [it, inserted] = runs_.try_emplace(run_id);
    if (inserted) order_.push_back(run_id);
    return it->second;
}

void RunStore::apply(const Json& line) {
    const auto kind = line.at("kind").get<std::string>();
    if (kind == "started") {
        auto& e = entry_for(line.at("run_id").get<std::string>());
        e.query = line.at("query").get<std::string>();
        e.started_at = parse_timestamp(line.at("started_at").get<std::string>()).value();
    } else if (kind == "event") {
        auto event = layer_event_from_json(line.at("event"));
        entry_for(event.run_id).events.push_back(std::move(event));
    } else if (kind == "run") {
        auto record = run_record_from_json(line.at("record"));
        auto& e = entry_for(record.run_id);
        e.query = record.query;
        e.started_at = record.started_at;
        e.record = std::move(record);
    }
}

void RunStore::append_line(const Json& line) {
    const auto day = utc_day(now_utc());
    if (day != open_day_ || !out_.is_open()) {
        if (out_.is_open()) out_.close();
        out_.clear();
        out_.open(dir_ / ("runs-" + day + ".jsonl"), std::ios::binary | std::ios::app);
        if (!out_) throw std::runtime_error("cannot open run store file in " + dir_.string());
        open_day_ = day;
    }
    out_ << line.dump() << '\n';
    out_.flush();
    if (!out_) {
        out_.close();
        open_day_.clear();
        throw std::runtime_error("write to run store failed");
    }
}

void RunStore::record_started(const std::string& run_id, const std::string& query, Timestamp started_at) {
    const Json line{{"kind", "started"}, {"run_id", run_id}, {"query", query}, {"started_at", format_timestamp(started_at)}};
    {
        std::lock_guard lock(mutex_);
        append_line(line);
        apply(line);
    }
    changed_.notify_all();
}

void RunStore::append_event(const LayerEvent& event) {
    const Json line{{"kind", "event"}, {"event", event}};
    {
        std::lock_guard lock(mutex_);
        append_line(line);
        entry_for(event.run_id).events.push_back(event);
    }
    changed_.notify_all();
}

void RunStore::record_finished(const RunRecord& record) {
    const Json line{{"kind", "run"}, {"record", record}};
    {
        std::lock_guard lock(mutex_);
        append_line(line);
        auto& e = entry_for(record.run_id);
        e.query = record.query;
        e.started_at = record.started_at;
        e.record = record;
    }
    changed_.notify_all();
}

bool RunStore::contains(const std::string& run_id) const {
    std::lock_guard lock(mutex_);
    return runs_.contains(run_id);
}

std::optional<Json> RunStore::get(const std::string& run_id) const {
    std::lock_guard lock(mutex_);
    const auto it = runs_.find(run_id);
    if (it == runs_.end()) return std::nullopt;
    if (it->second.record) return Json(*it->second.record);
    return Json{{"run_id", run_id},
                {"query", it->second.query},
                {"status", "running"},
                {"started_at", format_timestamp(it->second.started_at)}};
}

RunStore::Page RunStore::list(std::size_t limit, std::size_t offset) const {
    std::lock_guard lock(mutex_);
    Page page;
    page.total = order_.size();
    for (std::size_t i = offset; i < order_.size() && page.runs.size() < limit; ++i) {
        const auto& id = order_[order_.size() - 1 - i];
        const auto& e = runs_.at(id);
        Json item{{"run_id", id}, {"query", e.query}, {"started_at", format_timestamp(e.started_at)}};
        if (e.record) {
            item["status"] = std::string(to_string(e.record->status));
            item["finished_at"] = format_timestamp(e.record->finished_at);
            item["failure_reason"] = e.record->failure_reason ? Json(*e.record->failure_reason) : Json(nullptr);
            item["ledger_total"] = ledger_total(e.record->ledger);
            item["intent"] = e.record->plan ? Json(std::string(to_string(e.record->plan->intent))) : Json(nullptr);
        } else {
            item["status"] = "running";
        }
        page.runs.push_back(std::move(item));
    }
    return page;
}

std::vector<LayerEvent> RunStore::events(const std::string& run_id) const {
    std::lock_guard lock(mutex_);
    const auto it = runs_.find(run_id);
    return it == runs_.end() ? std::vector<LayerEvent>{} : it->second.events;
}

std::vector<LayerEvent> RunStore::wait_events(const std::string& run_id, std::size_t have,
                                              std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    const auto ready = [&] {
        if (closed_) return true;
        const auto it = runs_.find(run_id);
        return it == runs_.end() || it->second.events.size() > have;
    };
    changed_.wait_for(lock, timeout, ready);
    const auto it = runs_.find(run_id);
    if (it == runs_.end() || it->second.events.size() <= have) return {};
    return {it->second.events.begin() + static_cast<std::ptrdiff_t>(have), it->second.events.end()};
}

void RunStore::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        if (out_.is_open()) out_.flush();
    }
    changed_.notify_all();
}

std::size_t RunStore::size() const {
    std::lock_guard lock(mutex_);
    return order_.size();
}

}  // namespace res::service
