#pragma once

#include "res/core/json.hpp"
#include "res/core/time.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace res {

// Lifecycle of a single run, in emission order. RunCompleted and RunFailed
// are mutually exclusive terminal events.
enum class LayerEventKind {
    ReasonerStarted,
    ReasonerCompleted,
    ExecutorStarted,
    ExecutorCompleted,
    SynthesizerStarted,
    SynthesizerCompleted,
    RunCompleted,
    RunFailed,
};

std::string_view to_string(LayerEventKind kind);
std::optional<LayerEventKind> layer_event_from_string(std::string_view text);
bool is_terminal(LayerEventKind kind);

struct LayerEvent {
    std::string run_id;
    LayerEventKind event = LayerEventKind::ReasonerStarted;
    Json payload;
    Timestamp at{};
};

void to_json(Json& j, const LayerEvent& e);
LayerEvent layer_event_from_json(const Json& j);

using EventSink = std::function<void(const LayerEvent&)>;

}  // namespace res
