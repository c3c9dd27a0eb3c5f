#include "res/core/json.hpp"

#include "res/core/events.hpp"

#include <stdexcept>

namespace res {

namespace {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw std::invalid_argument(std::string("missing field: ") + key);
    }
    return j.at(key);
}

std::string require_string(const Json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_string()) throw std::invalid_argument(std::string("field is not a string: ") + key);
    return v.get<std::string>();
}

std::int64_t require_int(const Json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_number_integer()) throw std::invalid_argument(std::string("field is not an integer: ") + key);
    return v.get<std::int64_t>();
}

std::uint64_t require_count(const Json& j, const char* key) {
    const auto v = require_int(j, key);
    if (v < 0) throw std::invalid_argument(std::string("negative count: ") + key);
    return static_cast<std::uint64_t>(v);
}

Timestamp require_timestamp(const Json& j, const char* key) {
    auto t = parse_timestamp(require_string(j, key));
    if (!t) throw std::invalid_argument(std::string("bad timestamp: ") + key);
    return *t;
}

}  // namespace

void to_json(Json& j, const YearRange& r) {
    j = Json{{"from_year", r.from_year}, {"until_year", r.until_year}};
}

void to_json(Json& j, const QueryPlan& plan) {
    j = Json::object();
    j["intent"] = std::string(to_string(plan.intent));
    j["subjects"] = plan.subjects;
    if (plan.time_range) j["time_range"] = *plan.time_range;
    if (plan.top_n) j["top_n"] = *plan.top_n;
    if (plan.rank_dimension) j["rank_dimension"] = std::string(to_string(*plan.rank_dimension));
}

void to_json(Json& j, const DataPoint& p) { j = Json{{"label", p.label}, {"value", p.value}}; }

void to_json(Json& j, const Series& s) { j = Json{{"subject", s.subject}, {"points", s.points}}; }

void to_json(Json& j, const SummaryMetadata& m) {
    j = Json{{"source_name", m.source_name},
             {"dataset_size_estimate", m.dataset_size_estimate},
             {"retrieved_at", format_timestamp(m.retrieved_at)},
             {"plan_echo", m.plan_echo}};
}

void to_json(Json& j, const StatisticalSummary& s) {
    j = Json{{"series", s.series}, {"totals", Json(s.totals)}, {"metadata", s.metadata}};
}

void to_json(Json& j, const ChartConfig& c) {
    j = Json{{"chart_type", std::string(to_string(c.chart_type))},
             {"x_label", c.x_label},
             {"y_label", c.y_label},
             {"series_refs", c.series_refs}};
}

void to_json(Json& j, const Narrative& n) {
    j = Json{{"text", n.text}};
    j["chart"] = n.chart ? Json(*n.chart) : Json(nullptr);
}

void to_json(Json& j, const TokenUsage& u) {
    j = Json{{"input_tokens", u.input_tokens},
             {"output_tokens", u.output_tokens},
             {"source", u.source == UsageSource::Reported ? "reported" : "estimated"}};
}

void to_json(Json& j, const RunLedger& l) {
    j = Json{{"reasoner", l.reasoner},
             {"executor", l.executor},
             {"synthesizer", l.synthesizer},
             {"total", ledger_total(l)}};
}

void to_json(Json& j, const RunRecord& r) {
    j = Json{{"run_id", r.run_id},
             {"query", r.query},
             {"ledger", r.ledger},
             {"started_at", format_timestamp(r.started_at)},
             {"finished_at", format_timestamp(r.finished_at)},
             {"status", std::string(to_string(r.status))}};
    j["plan"] = r.plan ? Json(*r.plan) : Json(nullptr);
    j["summary"] = r.summary ? Json(*r.summary) : Json(nullptr);
    j["narrative"] = r.narrative ? Json(*r.narrative) : Json(nullptr);
    j["failure_reason"] = r.failure_reason ? Json(*r.failure_reason) : Json(nullptr);
}

QueryPlan plan_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("plan is not a JSON object");
    QueryPlan plan;
    const auto intent_text = require_string(j, "intent");
    auto intent = intent_from_string(intent_text);
    if (!intent) throw std::invalid_argument("unknown intent: " + intent_text);
    plan.intent = *intent;

    const auto& subjects = require(j, "subjects");
    if (!subjects.is_array()) throw std::invalid_argument("subjects is not an array");
    for (const auto& s : subjects) {
        if (!s.is_string()) throw std::invalid_argument("subject is not a string");
        plan.subjects.push_back(s.get<std::string>());
    }
    if (j.contains("time_range") && !j.at("time_range").is_null()) {
        const auto& r = j.at("time_range");
        plan.time_range = YearRange{static_cast<int>(require_int(r, "from_year")),
                                    static_cast<int>(require_int(r, "until_year"))};
    }
    if (j.contains("top_n") && !j.at("top_n").is_null()) {
        plan.top_n = static_cast<int>(require_int(j, "top_n"));
    }
    if (j.contains("rank_dimension") && !j.at("rank_dimension").is_null()) {
        const auto text = require_string(j, "rank_dimension");
        auto dim = rank_dimension_from_string(text);
        if (!dim) throw std::invalid_argument("unknown rank_dimension: " + text);
        plan.rank_dimension = *dim;
    }
    return plan;
}

StatisticalSummary summary_from_json(const Json& j) {
    StatisticalSummary s;
    const auto& series = require(j, "series");
    if (!series.is_array()) throw std::invalid_argument("series is not an array");
    for (const auto& sj : series) {
        Series out;
        out.subject = require_string(sj, "subject");
        const auto& points = require(sj, "points");
        if (!points.is_array()) throw std::invalid_argument("points is not an array");
        for (const auto& pj : points) {
            out.points.push_back({require_string(pj, "label"), require_count(pj, "value")});
        }
        s.series.push_back(std::move(out));
    }
    const auto& totals = require(j, "totals");
    if (!totals.is_object()) throw std::invalid_argument("totals is not an object");
    for (const auto& [k, v] : totals.items()) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw std::invalid_argument("total is not a non-negative integer");
        }
        s.totals[k] = v.get<std::uint64_t>();
    }
    const auto& m = require(j, "metadata");
    s.metadata.source_name = require_string(m, "source_name");
    s.metadata.dataset_size_estimate = require_count(m, "dataset_size_estimate");
    s.metadata.retrieved_at = require_timestamp(m, "retrieved_at");
    s.metadata.plan_echo = plan_from_json(require(m, "plan_echo"));
    return s;
}

Narrative narrative_from_json(const Json& j) {
    Narrative n;
    n.text = require_string(j, "text");
    if (j.contains("chart") && !j.at("chart").is_null()) {
        const auto& c = j.at("chart");
        ChartConfig chart;
        const auto type_text = require_string(c, "chart_type");
        auto type = chart_type_from_string(type_text);
        if (!type) throw std::invalid_argument("unknown chart_type: " + type_text);
        chart.chart_type = *type;
        chart.x_label = require_string(c, "x_label");
        chart.y_label = require_string(c, "y_label");
        for (const auto& r : require(c, "series_refs")) chart.series_refs.push_back(r.get<std::string>());
        n.chart = std::move(chart);
    }
    return n;
}

TokenUsage usage_from_json(const Json& j) {
    TokenUsage u;
    u.input_tokens = require_count(j, "input_tokens");
    u.output_tokens = require_count(j, "output_tokens");
    if (j.contains("source") && j.at("source") == "reported") u.source = UsageSource::Reported;
    return u;
}

RunLedger ledger_from_json(const Json& j) {
    return RunLedger{usage_from_json(require(j, "reasoner")), usage_from_json(require(j, "executor")),
                     usage_from_json(require(j, "synthesizer"))};
}

RunRecord run_record_from_json(const Json& j) {
    RunRecord r;
    r.run_id = require_string(j, "run_id");
    r.query = require_string(j, "query");
    r.ledger = ledger_from_json(require(j, "ledger"));
    r.started_at = require_timestamp(j, "started_at");
    r.finished_at = require_timestamp(j, "finished_at");
    const auto status = require_string(j, "status");
    if (status == "completed") {
        r.status = RunStatus::Completed;
    } else if (status == "failed") {
        r.status = RunStatus::Failed;
    } else {
        throw std::invalid_argument("unknown run status: " + status);
    }
    const auto present = [&](const char* key) { return j.contains(key) && !j.at(key).is_null(); };
    if (present("plan")) r.plan = plan_from_json(j.at("plan"));
    if (present("summary")) r.summary = summary_from_json(j.at("summary"));
    if (present("narrative")) r.narrative = narrative_from_json(j.at("narrative"));
    if (present("failure_reason")) r.failure_reason = j.at("failure_reason").get<std::string>();
    return r;
}

std::string serialize_canonical(const StatisticalSummary& summary) {
    return Json(summary).dump(-1, ' ', false, Json::error_handler_t::strict);
}

std::string serialize_plan(const QueryPlan& plan) { return Json(plan).dump(); }

// events

std::string_view to_string(LayerEventKind kind) {
    switch (kind) {
        case LayerEventKind::ReasonerStarted: return "reasoner_started";
        case LayerEventKind::ReasonerCompleted: return "reasoner_completed";
        case LayerEventKind::ExecutorStarted: return "executor_started";
        case LayerEventKind::ExecutorCompleted: return "executor_completed";
        case LayerEventKind::SynthesizerStarted: return "synthesizer_started";
        case LayerEventKind::SynthesizerCompleted: return "synthesizer_completed";
        case LayerEventKind::RunCompleted: return "run_completed";
        case LayerEventKind::RunFailed: return "run_failed";
    }
    return "run_failed";
}

std::optional<LayerEventKind> layer_event_from_string(std::string_view text) {
    for (int k = 0; k <= static_cast<int>(LayerEventKind::RunFailed); ++k) {
        const auto kind = static_cast<LayerEventKind>(k);
        if (to_string(kind) == text) return kind;
    }
    return std::nullopt;
}

bool is_terminal(LayerEventKind kind) {
    return kind == LayerEventKind::RunCompleted || kind == LayerEventKind::RunFailed;
}

void to_json(Json& j, const LayerEvent& e) {
    j = Json{{"run_id", e.run_id},
             {"event", std::string(to_string(e.event))},
             {"payload", e.payload},
             {"at", format_timestamp(e.at)}};
}

LayerEvent layer_event_from_json(const Json& j) {
    LayerEvent e;
    e.run_id = require_string(j, "run_id");
    const auto name = require_string(j, "event");
    auto kind = layer_event_from_string(name);
    if (!kind) throw std::invalid_argument("unknown event: " + name);
    e.event = *kind;
    e.payload = j.contains("payload") ? j.at("payload") : Json(nullptr);
    e.at = require_timestamp(j, "at");
    return e;
}

}  // namespace res
