#include "appwatch/events.hpp"

#include <array>
#include <map>
#include <utility>

#include <fmt/format.h>

#include "appwatch/error.hpp"

namespace appwatch {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 10> kKindNames{{
    {EventKind::ScreenOn, "ScreenOn"},
    {EventKind::ScreenOff, "ScreenOff"},
    {EventKind::OutSms, "OutSms"},
    {EventKind::InSms, "InSms"},
    {EventKind::OutCallStart, "OutCallStart"},
    {EventKind::OutCallEnd, "OutCallEnd"},
    {EventKind::InCallStart, "InCallStart"},
    {EventKind::InCallEnd, "InCallEnd"},
    {EventKind::AppStart, "AppStart"},
    {EventKind::AppStop, "AppStop"},
}};

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t from = 0;
    while (true) {
        const auto at = text.find(sep, from);
        if (at == std::string_view::npos) {
            parts.push_back(text.substr(from));
            return parts;
        }
        parts.push_back(text.substr(from, at - from));
        from = at + 1;
    }
}

Timestamp parse_header_time(std::string_view value, std::size_t line) {
    try {
        return parse_date(value);
    } catch (const DateError& e) {
        throw ParseError(ParseError::Kind::Date, line, e.what());
    }
}

}  // namespace

AppId::AppId(std::string name) : name_(std::move(name)) {
    if (name_.empty()) throw Error("app name must not be empty");
    if (name_.find_first_of("\r\n") != std::string::npos)
        throw Error("app name must not contain line breaks");
}

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view text) {
    for (const auto& [k, name] : kKindNames)
        if (name == text) return k;
    return std::nullopt;
}

std::optional<Timestamp> EventTrace::window_start() const {
    if (start) return start;
    if (events.empty()) return std::nullopt;
    return events.front().at;
}

std::optional<Timestamp> EventTrace::window_end() const {
    if (end) return end;
    if (events.empty()) return window_start();
    return events.back().at + 1;
}

std::string Violation::describe() const { return fmt::format("event {}: {}", index, rule); }

std::vector<Violation> validate_trace(const EventTrace& trace) {
    std::vector<Violation> out;
    bool screen = trace.initial_screen;
    // Open call depth per (app, direction).
    std::map<std::pair<std::string, bool>, int> open_calls;

    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const auto& ev = trace.events[i];
        if (i > 0 && ev.at < trace.events[i - 1].at)
            out.push_back({i, "timestamp earlier than previous event"});
        if (trace.start && ev.at < *trace.start) out.push_back({i, "timestamp before trace start"});
        if (trace.end && ev.at > *trace.end) out.push_back({i, "timestamp after trace end"});

        if (requires_app(ev.kind) && !ev.app)
            out.push_back({i, fmt::format("{} requires an app", to_string(ev.kind))});
        if (!requires_app(ev.kind) && ev.app)
            out.push_back({i, fmt::format("{} must not carry an app", to_string(ev.kind))});

        switch (ev.kind) {
            case EventKind::ScreenOn:
                if (screen) out.push_back({i, "ScreenOn while screen already on"});
                screen = true;
                break;
            case EventKind::ScreenOff:
                if (!screen) out.push_back({i, "ScreenOff while screen already off"});
                screen = false;
                break;
            case EventKind::OutCallStart:
            case EventKind::InCallStart:
                if (ev.app) ++open_calls[{ev.app->name(), ev.kind == EventKind::OutCallStart}];
                break;
            case EventKind::OutCallEnd:
            case EventKind::InCallEnd: {
                if (!ev.app) break;
                const bool outgoing = ev.kind == EventKind::OutCallEnd;
                auto& depth = open_calls[{ev.app->name(), outgoing}];
                if (depth == 0)
                    out.push_back({i, fmt::format("{} without matching {} for app '{}'", to_string(ev.kind),
                                                  outgoing ? "OutCallStart" : "InCallStart", ev.app->name())});
                else
                    --depth;
                break;
            }
            default:
                break;
        }
    }

    if (trace.start && trace.end && *trace.end < *trace.start)
        out.push_back({trace.events.size(), "trace end precedes trace start"});
    for (std::size_t i = 0; i < trace.initial_apps.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (trace.initial_apps[i] == trace.initial_apps[j])
                out.push_back({trace.events.size(),
                               fmt::format("initial app '{}' listed twice", trace.initial_apps[i].name())});
    return out;
}

void require_valid(const EventTrace& trace) {
    const auto violations = validate_trace(trace);
    if (violations.empty()) return;
    std::vector<std::string> lines;
    lines.reserve(violations.size());
    for (const auto& v : violations) lines.push_back(v.describe());
    throw ValidationError(std::move(lines));
}

EventTrace read_trace(std::string_view text) {
    EventTrace trace;
    std::size_t line_no = 0;
    bool seen_event = false;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto eq = line.find('=');
            const auto key = line.substr(1, eq == std::string_view::npos ? line.size() : eq - 1);
            const auto value = eq == std::string_view::npos ? std::string_view{} : line.substr(eq + 1);
            const bool header = key == "screen" || key == "apps" || key == "start" || key == "end";
            if (!header || eq == std::string_view::npos) continue;  // comment
            if (seen_event)
                throw ParseError(ParseError::Kind::Syntax, line_no,
                                 fmt::format("header '#{}' after the first event", key));
            if (key == "screen") {
                if (value == "on") trace.initial_screen = true;
                else if (value == "off") trace.initial_screen = false;
                else
                    throw ParseError(ParseError::Kind::Syntax, line_no,
                                     fmt::format("expected 'on' or 'off' after #screen=, got '{}'", value));
            } else if (key == "apps") {
                trace.initial_apps.clear();
                if (value.empty()) continue;
                for (auto name : split(value, ',')) {
                    if (name.empty())
                        throw ParseError(ParseError::Kind::Syntax, line_no, "empty app name in #apps");
                    trace.initial_apps.emplace_back(std::string(name));
                }
            } else if (key == "start") {
                trace.start = parse_header_time(value, line_no);
            } else {
                trace.end = parse_header_time(value, line_no);
            }
            continue;
        }

        const auto fields = split(line, '|');
        if (fields.size() != 3)
            throw ParseError(ParseError::Kind::Syntax, line_no,
                             fmt::format("expected '<timestamp>|<EventKind>|<app>' (3 fields), got {}",
                                         fields.size()));
        DeviceEvent ev;
        try {
            ev.at = parse_date(fields[0]);
        } catch (const DateError& e) {
            throw ParseError(ParseError::Kind::Date, line_no,
                             fmt::format("expected timestamp 'MM.dd.yyyy HH:mm:ss': {}", e.what()));
        }
        const auto kind = event_kind_from_string(fields[1]);
        if (!kind)
            throw ParseError(ParseError::Kind::Syntax, line_no,
                             fmt::format("expected an event kind, got '{}'", fields[1]));
        ev.kind = *kind;
        if (!fields[2].empty()) ev.app = AppId(std::string(fields[2]));
        trace.events.push_back(std::move(ev));
        seen_event = true;
    }
    return trace;
}

std::string write_trace(const EventTrace& trace) {
    std::string out = fmt::format("#screen={}\n#apps=", trace.initial_screen ? "on" : "off");
    for (std::size_t i = 0; i < trace.initial_apps.size(); ++i) {
        const auto& name = trace.initial_apps[i].name();
        if (name.find_first_of(",|") != std::string::npos)
            throw Error(fmt::format("initial app name '{}' cannot be written to a trace", name));
        if (i > 0) out += ',';
        out += name;
    }
    out += '\n';
    if (trace.start) out += fmt::format("#start={}\n", format_date(*trace.start));
    if (trace.end) out += fmt::format("#end={}\n", format_date(*trace.end));
    for (const auto& ev : trace.events) {
        const std::string app = ev.app ? ev.app->name() : std::string{};
        if (app.find('|') != std::string::npos)
            throw Error(fmt::format("app name '{}' cannot be written to a trace", app));
        out += fmt::format("{}|{}|{}\n", format_date(ev.at), to_string(ev.kind), app);
    }
    return out;
}

}  // namespace appwatch
