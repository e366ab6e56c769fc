#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "appwatch/timestamp.hpp"

namespace appwatch {

/// Application or service name. Non-empty, no line breaks; compared bytewise.
class AppId {
public:
    explicit AppId(std::string name);

    const std::string& name() const noexcept { return name_; }

    friend auto operator<=>(const AppId&, const AppId&) = default;

private:
    std::string name_;
};

enum class EventKind {
    ScreenOn,
    ScreenOff,
    OutSms,
    InSms,
    OutCallStart,
    OutCallEnd,
    InCallStart,
    InCallEnd,
    AppStart,
    AppStop,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view text);

/// ScreenOn/ScreenOff are device-global; every other kind names one app.
constexpr bool requires_app(EventKind kind) {
    return kind != EventKind::ScreenOn && kind != EventKind::ScreenOff;
}

struct DeviceEvent {
    Timestamp at;
    EventKind kind = EventKind::ScreenOn;
    std::optional<AppId> app;

    friend bool operator==(const DeviceEvent&, const DeviceEvent&) = default;
};

/// A recorded stretch of device activity.
///
/// `start`/`end` bound the observation window; when absent they default to
/// the first event and one second past the last event.
struct EventTrace {
    std::vector<DeviceEvent> events;
    bool initial_screen = false;
    std::vector<AppId> initial_apps;  // ordered, duplicate-free
    std::optional<Timestamp> start;
    std::optional<Timestamp> end;

    std::optional<Timestamp> window_start() const;
    std::optional<Timestamp> window_end() const;

    friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

struct Violation {
    std::size_t index;  // offending event index
    std::string rule;

    std::string describe() const;
    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks ordering, app attribution, call nesting and screen alternation.
/// Never throws; an empty result means the trace is valid.
std::vector<Violation> validate_trace(const EventTrace& trace);

/// Throws ValidationError if validate_trace reports anything.
void require_valid(const EventTrace& trace);

/// Reads the line-oriented trace format:
///
///     #screen=on
///     #apps=com.a,com.b
///     #start=10.03.2015 08:40:38
///     #end=10.03.2015 09:40:38
///     10.03.2015 08:40:38|OutSms|com.a
///
/// Other lines starting with '#' are comments. Throws ParseError with the
/// 1-based line number on malformed input.
EventTrace read_trace(std::string_view text);

/// Canonical rendering accepted by read_trace. Throws Error for app names
/// that cannot be represented (containing '|', or ',' inside #apps).
std::string write_trace(const EventTrace& trace);

}  // namespace appwatch
