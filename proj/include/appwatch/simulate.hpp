#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "appwatch/events.hpp"
#include "appwatch/extract.hpp"

namespace appwatch::simulate {

/// Mean gaps, in seconds, between benign activities of one app.
///
/// Outgoing SMS and calls are user actions and only happen while the screen
/// is on; incoming SMS and calls arrive at any time. None of these numbers
/// come from measurements: they are a plausible, tunable session model.
struct BenignRates {
    std::int64_t out_sms_gap = 1800;
    std::int64_t in_sms_gap = 2400;
    std::int64_t out_call_gap = 3600;
    std::int64_t in_call_gap = 5400;
    std::int64_t call_length = 120;
    std::int64_t launch_gap = 300;  // foreground app launches while screen on
};

/// Alternating screen-on / screen-off periods. With `fixed` the means are
/// used verbatim instead of drawing geometric lengths.
struct SessionModel {
    std::int64_t on_mean = 600;
    std::int64_t off_mean = 1800;
    bool fixed = false;
};

/// Sends one SMS per period, but only when the timer fires while the screen is off.
struct SmsWhileIdle {
    std::int64_t period = 60;
};

/// Places a short outgoing call once per period while the screen is off.
struct CallWhileIdle {
    std::int64_t period = 60;
};

/// Opens an incoming call, sends an SMS inside it, then hangs up (once).
struct SmsDuringCall {};

using Behavior = std::variant<SmsWhileIdle, CallWhileIdle, SmsDuringCall>;

struct Injection {
    AppId app;
    Behavior behavior;
    std::int64_t start_offset = 0;  // seconds after scenario start
};

struct Scenario {
    std::int64_t duration = 3600;
    std::uint64_t seed = 0;
    Timestamp start = Timestamp(1443861638);  // 10.03.2015 08:40:38 (MM.dd.yyyy)
    bool initial_screen = true;
    std::vector<AppId> apps;             // background apps, running throughout
    std::vector<AppId> foreground_apps;  // launched during screen-on sessions
    BenignRates benign;
    SessionModel session;
    std::vector<Injection> injections;
};

/// Throws ConfigError naming the first invalid field.
void validate_scenario(const Scenario& scenario);

/// Deterministic trace for `scenario`; valid under validate_trace.
EventTrace generate(const Scenario& scenario);

/// Appends hand-crafted rows after `dataset`, preserving both orders.
std::vector<FeatureInstance> inject_manual_vectors(std::vector<FeatureInstance> dataset,
                                                   std::span<const FeatureInstance> vectors);

}  // namespace appwatch::simulate
