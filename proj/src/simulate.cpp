#include "appwatch/simulate.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "appwatch/error.hpp"
#include "appwatch/rng.hpp"

namespace appwatch::simulate {

namespace {

// Same-second ordering between event sources: screen changes first, then
// app lifecycle, benign activity, and injections in declaration order.
enum Source : int { kScreen = 0, kLifecycle = 1, kBenign = 2, kInjection = 3 };

struct Pending {
    std::int64_t at;  // offset from scenario start
    int source;
    DeviceEvent event;
};

struct Span {
    std::int64_t begin;
    std::int64_t end;  // exclusive
    bool screen_on;
};

struct Interval {
    std::int64_t begin;
    std::int64_t end;
    bool contains(std::int64_t t) const { return t >= begin && t <= end; }
};

class Builder {
public:
    explicit Builder(const Scenario& s) : s_(s), rng_(s.seed) {}

    EventTrace run() {
        build_sessions();
        foreground();
        for (const auto& app : s_.apps) benign(app);
        for (std::size_t i = 0; i < s_.injections.size(); ++i) inject(s_.injections[i], static_cast<int>(i));

        std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
            return a.at != b.at ? a.at < b.at : a.source < b.source;
        });

        EventTrace trace;
        trace.initial_screen = s_.initial_screen;
        trace.start = s_.start;
        trace.end = s_.start + s_.duration;
        for (const auto& app : s_.apps) add_unique(trace.initial_apps, app);
        for (const auto& inj : s_.injections) add_unique(trace.initial_apps, inj.app);
        trace.events.reserve(pending_.size());
        for (auto& p : pending_) trace.events.push_back(std::move(p.event));
        return trace;
    }

private:
    static void add_unique(std::vector<AppId>& apps, const AppId& app) {
        if (std::find(apps.begin(), apps.end(), app) == apps.end()) apps.push_back(app);
    }

    void push(std::int64_t at, int source, EventKind kind, const std::optional<AppId>& app = std::nullopt) {
        pending_.push_back({at, source, DeviceEvent{s_.start + at, kind, app}});
    }

    std::int64_t draw(std::int64_t mean) { return rng_.geometric_gap(mean); }

    bool screen_on_at(std::int64_t t) const {
        for (const auto& span : spans_)
            if (t >= span.begin && t < span.end) return span.screen_on;
        return spans_.empty() ? s_.initial_screen : spans_.back().screen_on;
    }

    void build_sessions() {
        bool on = s_.initial_screen;
        std::int64_t t = 0;
        while (t < s_.duration) {
            const auto mean = on ? s_.session.on_mean : s_.session.off_mean;
            const auto len = s_.session.fixed ? mean : draw(mean);
            spans_.push_back({t, std::min(t + len, s_.duration), on});
            t += len;
            on = !on;
            if (t < s_.duration) push(t, kScreen, on ? EventKind::ScreenOn : EventKind::ScreenOff);
        }
    }

    void foreground() {
        if (s_.foreground_apps.empty()) return;
        for (const auto& span : spans_) {
            if (!span.screen_on) continue;
            std::vector<AppId> started;
            for (auto t = span.begin + draw(s_.benign.launch_gap); t < span.end; t += draw(s_.benign.launch_gap)) {
                std::vector<const AppId*> idle;
                for (const auto& app : s_.foreground_apps)
                    if (std::find(started.begin(), started.end(), app) == started.end()) idle.push_back(&app);
                if (idle.empty()) break;
                const auto& app = *idle[rng_.below(idle.size())];
                push(t, kLifecycle, EventKind::AppStart, app);
                started.push_back(app);
            }
            if (span.end < s_.duration)
                for (const auto& app : started) push(span.end, kLifecycle, EventKind::AppStop, app);
        }
    }

    // Benign traffic for one background app. User-initiated actions stay
    // inside screen-on spans; outgoing calls end before the screen goes off;
    // SMS that would coincide with one of the app's own calls are dropped.
    void benign(const AppId& app) {
        const auto& r = s_.benign;
        std::vector<Interval> out_calls;
        std::vector<Interval> all_calls;

        for (const auto& span : spans_) {
            if (!span.screen_on) continue;
            for (auto t = span.begin + draw(r.out_call_gap); t < span.end;) {
                const auto end = std::min(t + draw(r.call_length), span.end - 1);
                if (end <= t) break;
                push(t, kBenign, EventKind::OutCallStart, app);
                push(end, kBenign, EventKind::OutCallEnd, app);
                out_calls.push_back({t, end});
                all_calls.push_back({t, end});
                t = end + draw(r.out_call_gap);
            }
        }
        for (auto t = draw(r.in_call_gap); t < s_.duration;) {
            const auto end = std::min(t + draw(r.call_length), s_.duration);
            push(t, kBenign, EventKind::InCallStart, app);
            push(end, kBenign, EventKind::InCallEnd, app);
            all_calls.push_back({t, end});
            t = end + draw(r.in_call_gap);
        }

        auto inside = [](const std::vector<Interval>& calls, std::int64_t t) {
            return std::any_of(calls.begin(), calls.end(), [t](const Interval& c) { return c.contains(t); });
        };
        for (const auto& span : spans_) {
            if (!span.screen_on) continue;
            for (auto t = span.begin + draw(r.out_sms_gap); t < span.end; t += draw(r.out_sms_gap))
                if (!inside(all_calls, t)) push(t, kBenign, EventKind::OutSms, app);
        }
        for (auto t = draw(r.in_sms_gap); t < s_.duration; t += draw(r.in_sms_gap))
            if (!inside(out_calls, t)) push(t, kBenign, EventKind::InSms, app);
    }

    void inject(const Injection& inj, int index) {
        const int source = kInjection + index;
        std::visit(
            [&](const auto& b) {
                using B = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<B, SmsWhileIdle>) {
                    for (auto t = inj.start_offset; t < s_.duration; t += b.period)
                        if (!screen_on_at(t)) push(t, source, EventKind::OutSms, inj.app);
                } else if constexpr (std::is_same_v<B, CallWhileIdle>) {
                    const auto length = std::max<std::int64_t>(1, std::min<std::int64_t>(30, b.period - 1));
                    for (auto t = inj.start_offset; t < s_.duration; t += b.period) {
                        if (screen_on_at(t)) continue;
                        push(t, source, EventKind::OutCallStart, inj.app);
                        push(std::min(t + length, s_.duration), source, EventKind::OutCallEnd, inj.app);
                    }
                } else {
                    const auto t = inj.start_offset;
                    if (t >= s_.duration) return;
                    push(t, source, EventKind::InCallStart, inj.app);
                    push(t, source, EventKind::OutSms, inj.app);
                    push(std::min(t + 1, s_.duration), source, EventKind::InCallEnd, inj.app);
                }
            },
            inj.behavior);
    }

    const Scenario& s_;
    Xorshift64Star rng_;
    std::vector<Span> spans_;
    std::vector<Pending> pending_;
};

void require_positive(std::int64_t v, const std::string& field) {
    if (v <= 0) throw ConfigError(field, fmt::format("must be > 0, got {}", v));
}

}  // namespace

void validate_scenario(const Scenario& s) {
    require_positive(s.duration, "duration");
    if (s.start.seconds() + s.duration > kMaxTimestampSeconds)
        throw ConfigError("duration", "scenario runs past year 9999");
    require_positive(s.benign.out_sms_gap, "benign.out_sms_gap");
    require_positive(s.benign.in_sms_gap, "benign.in_sms_gap");
    require_positive(s.benign.out_call_gap, "benign.out_call_gap");
    require_positive(s.benign.in_call_gap, "benign.in_call_gap");
    require_positive(s.benign.call_length, "benign.call_length");
    require_positive(s.benign.launch_gap, "benign.launch_gap");
    require_positive(s.session.on_mean, "session.on_mean");
    require_positive(s.session.off_mean, "session.off_mean");
    for (std::size_t i = 0; i < s.injections.size(); ++i) {
        const auto& inj = s.injections[i];
        const auto prefix = fmt::format("injection[{}]", i);
        if (inj.start_offset < 0) throw ConfigError(prefix + ".start_offset", "must be >= 0");
        if (const auto* b = std::get_if<SmsWhileIdle>(&inj.behavior)) require_positive(b->period, prefix + ".period");
        if (const auto* b = std::get_if<CallWhileIdle>(&inj.behavior)) require_positive(b->period, prefix + ".period");
    }
}

EventTrace generate(const Scenario& scenario) {
    validate_scenario(scenario);
    return Builder(scenario).run();
}

std::vector<FeatureInstance> inject_manual_vectors(std::vector<FeatureInstance> dataset,
                                                   std::span<const FeatureInstance> vectors) {
    dataset.insert(dataset.end(), vectors.begin(), vectors.end());
    return dataset;
}

}  // namespace appwatch::simulate
