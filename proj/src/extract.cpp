#include "appwatch/extract.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "appwatch/error.hpp"

namespace appwatch {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{"OutCall", "InCall", "OutSMS", "InSMS", "Screen"};

struct AppState {
    int out_calls = 0;  // open interval depth
    int in_calls = 0;
};

class Collector {
public:
    Collector(const EventTrace& trace) : screen_(trace.initial_screen) {
        for (const auto& app : trace.initial_apps) mark_running(app);
    }

    void tick(Timestamp at) {
        for (const auto& app : running_) emit(at, app, FeatureBits{});
    }

    void apply(const DeviceEvent& ev) {
        switch (ev.kind) {
            case EventKind::ScreenOn: screen_ = true; return;
            case EventKind::ScreenOff: screen_ = false; return;
            case EventKind::AppStart: mark_running(*ev.app); return;
            case EventKind::AppStop:
                running_.erase(std::remove(running_.begin(), running_.end(), *ev.app), running_.end());
                return;
            case EventKind::OutCallEnd: --state(*ev.app).out_calls; return;
            case EventKind::InCallEnd: --state(*ev.app).in_calls; return;
            case EventKind::OutCallStart: ++state(*ev.app).out_calls; break;
            case EventKind::InCallStart: ++state(*ev.app).in_calls; break;
            default: break;
        }
        mark_running(*ev.app);
        FeatureBits activity;
        if (ev.kind == EventKind::OutSms) activity.set(Feature::OutSms, true);
        if (ev.kind == EventKind::InSms) activity.set(Feature::InSms, true);
        emit(ev.at, *ev.app, activity);
    }

    std::vector<FeatureInstance> take() { return std::move(out_); }

private:
    AppState& state(const AppId& app) { return calls_[app.name()]; }

    void mark_running(const AppId& app) {
        if (std::find(running_.begin(), running_.end(), app) == running_.end()) running_.push_back(app);
    }

    void emit(Timestamp at, const AppId& app, FeatureBits bits) {
        const auto& s = state(app);
        bits.set(Feature::OutCall, s.out_calls > 0);
        bits.set(Feature::InCall, s.in_calls > 0);
        bits.set(Feature::Screen, screen_);
        out_.push_back({at, app, bits, FeatureClass::Unknown});
    }

    bool screen_;
    std::vector<AppId> running_;
    std::map<std::string, AppState> calls_;
    std::vector<FeatureInstance> out_;
};

std::string csv_field(std::string_view value) {
    if (value.find_first_of(" ,'") == std::string_view::npos) return std::string(value);
    return arff::quote_if_needed(value);
}

std::string bit_text(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
    for (auto f : kAllFeatures)
        if (feature_name(f) == name) return f;
    return std::nullopt;
}

FeatureBits FeatureBits::from_code(unsigned code) {
    if (code > 31) throw Error(fmt::format("feature code {} out of range", code));
    FeatureBits bits;
    bits.mask_ = static_cast<std::uint8_t>(code);
    return bits;
}

void FeatureBits::set(Feature f, bool on) {
    const auto bit = static_cast<std::uint8_t>(1U << (4 - static_cast<int>(f)));
    mask_ = on ? static_cast<std::uint8_t>(mask_ | bit) : static_cast<std::uint8_t>(mask_ & ~bit);
}

std::string FeatureBits::to_string() const {
    return fmt::format("({},{},{},{},{})", int(out_call()), int(in_call()), int(out_sms()), int(in_sms()),
                       int(screen()));
}

std::string_view to_string(FeatureClass c) {
    switch (c) {
        case FeatureClass::Normal: return "Normal";
        case FeatureClass::Malicious: return "Malicious";
        case FeatureClass::Unknown: break;
    }
    return "?";
}

std::vector<FeatureInstance> extract(const EventTrace& trace, std::int64_t tick) {
    if (tick <= 0) throw Error(fmt::format("tick must be positive, got {}", tick));
    require_valid(trace);

    Collector collector(trace);
    const auto start = trace.window_start();
    const auto end = trace.window_end();
    if (!start) return {};

    std::int64_t next_tick = start->seconds();
    auto flush_ticks = [&](std::int64_t up_to_inclusive) {
        while (next_tick < end->seconds() && next_tick <= up_to_inclusive) {
            collector.tick(Timestamp(next_tick));
            next_tick += tick;
        }
    };
    for (const auto& ev : trace.events) {
        flush_ticks(ev.at.seconds());
        collector.apply(ev);
    }
    flush_ticks(end->seconds());
    return collector.take();
}

std::string to_csv(std::span<const FeatureInstance> instances) {
    std::string out;
    for (std::size_t i = 0; i < kSchemaNames.size(); ++i) {
        if (i > 0) out += ',';
        out += kSchemaNames[i];
    }
    out += '\n';
    for (const auto& inst : instances) {
        out += csv_field(format_date(inst.time));
        out += ',';
        out += csv_field(inst.app.name());
        for (auto f : kAllFeatures) out += "," + bit_text(inst.bits.get(f));
        out += ',';
        out += to_string(inst.label);
        out += '\n';
    }
    return out;
}

arff::Document to_arff(std::span<const FeatureInstance> instances, std::string_view relation) {
    arff::Document doc;
    doc.relation = std::string(relation);

    arff::Nominal apps;
    for (const auto& inst : instances)
        if (std::find(apps.values.begin(), apps.values.end(), inst.app.name()) == apps.values.end())
            apps.values.push_back(inst.app.name());

    doc.attributes.push_back({"Time", arff::Date{std::string(kDefaultDatePattern)}});
    if (apps.values.empty())
        doc.attributes.push_back({"AppName", arff::String{}});
    else
        doc.attributes.push_back({"AppName", std::move(apps)});
    for (auto f : kAllFeatures) doc.attributes.push_back({std::string(feature_name(f)), arff::Nominal{{"0", "1"}}});
    doc.attributes.push_back({"Class", arff::Nominal{{"Normal", "Malicious"}}});

    doc.rows.reserve(instances.size());
    for (const auto& inst : instances) {
        arff::Row row;
        row.reserve(kSchemaNames.size());
        row.emplace_back(inst.time);
        row.emplace_back(inst.app.name());
        for (auto f : kAllFeatures) row.emplace_back(bit_text(inst.bits.get(f)));
        if (inst.label == FeatureClass::Unknown)
            row.emplace_back(arff::Missing{});
        else
            row.emplace_back(std::string(to_string(inst.label)));
        doc.rows.push_back(std::move(row));
    }
    return doc;
}

void check_feature_schema(const arff::Document& doc) {
    for (std::size_t i = 0; i < kSchemaNames.size(); ++i) {
        const std::string name(kSchemaNames[i]);
        if (i >= doc.attributes.size()) throw SchemaError(name, "missing");
        const auto& attr = doc.attributes[i];
        if (attr.name != name)
            throw SchemaError(name, fmt::format("expected at position {}, found '{}'", i + 1, attr.name));
        if (i == 0) {
            if (!std::holds_alternative<arff::Date>(attr.type)) throw SchemaError(name, "must be a date attribute");
        } else if (i == 1) {
            if (!std::holds_alternative<arff::Nominal>(attr.type) && !std::holds_alternative<arff::String>(attr.type))
                throw SchemaError(name, "must be a nominal or string attribute");
        } else if (i + 1 < kSchemaNames.size()) {
            const auto* n = std::get_if<arff::Nominal>(&attr.type);
            if (!n || n->values.size() != 2 || !attr.nominal_index("0") || !attr.nominal_index("1"))
                throw SchemaError(name, "must be nominal {0,1}");
        } else {
            const auto* n = std::get_if<arff::Nominal>(&attr.type);
            if (!n || !attr.nominal_index("Normal") || !attr.nominal_index("Malicious") || n->values.size() != 2)
                throw SchemaError(name, "must be nominal {Normal,Malicious}");
        }
    }
    if (doc.attributes.size() > kSchemaNames.size())
        throw SchemaError(doc.attributes[kSchemaNames.size()].name, "unexpected extra attribute");
}

std::vector<FeatureInstance> from_arff(const arff::Document& doc) {
    check_feature_schema(doc);
    std::vector<FeatureInstance> out;
    out.reserve(doc.rows.size());
    for (std::size_t r = 0; r < doc.rows.size(); ++r) {
        const auto& row = doc.rows[r];
        auto require = [&](std::size_t col) -> const arff::Value& {
            if (std::holds_alternative<arff::Missing>(row[col]))
                throw SchemaError(std::string(kSchemaNames[col]), fmt::format("missing value in row {}", r + 1));
            return row[col];
        };
        const auto time = std::get<Timestamp>(require(0));
        AppId app(std::get<std::string>(require(1)));
        FeatureBits bits;
        for (auto f : kAllFeatures)
            bits.set(f, std::get<std::string>(require(2 + static_cast<std::size_t>(f))) == "1");
        FeatureClass label = FeatureClass::Unknown;
        if (const auto* c = std::get_if<std::string>(&row[7])) label = *c == "Normal" ? FeatureClass::Normal : FeatureClass::Malicious;
        out.push_back({time, std::move(app), bits, label});
    }
    return out;
}

}  // namespace appwatch
