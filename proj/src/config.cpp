#include "appwatch/config.hpp"

#include <charconv>
#include <set>

#include <fmt/format.h>

#include "appwatch/error.hpp"

namespace appwatch::config {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string field_name(const Section& s, std::string_view key) {
    return s.name.empty() ? std::string(key) : fmt::format("{}.{}", s.name, key);
}

void reject_unknown(const Section& s, std::initializer_list<std::string_view> known) {
    for (const auto& e : s.entries) {
        bool ok = false;
        for (auto k : known) ok = ok || e.key == k;
        if (!ok) throw ConfigError(field_name(s, e.key), fmt::format("unknown key (line {})", e.line));
    }
}

std::int64_t to_int(const Section& s, std::string_view key, std::int64_t fallback) {
    const auto v = s.get(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size())
        throw ConfigError(field_name(s, key), fmt::format("expected an integer, got '{}'", *v));
    return out;
}

std::uint64_t to_u64(const Section& s, std::string_view key, std::uint64_t fallback) {
    const auto v = s.get(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (v->empty() || ec != std::errc{} || ptr != v->data() + v->size())
        throw ConfigError(field_name(s, key), fmt::format("expected an unsigned integer, got '{}'", *v));
    return out;
}

bool to_bool(const Section& s, std::string_view key, bool fallback, std::string_view yes = "true",
             std::string_view no = "false") {
    const auto v = s.get(key);
    if (!v) return fallback;
    if (*v == yes) return true;
    if (*v == no) return false;
    throw ConfigError(field_name(s, key), fmt::format("expected '{}' or '{}', got '{}'", yes, no, *v));
}

Timestamp to_time(const Section& s, std::string_view key, Timestamp fallback) {
    const auto v = s.get(key);
    if (!v) return fallback;
    try {
        return parse_date(*v);
    } catch (const DateError& e) {
        throw ConfigError(field_name(s, key), e.what());
    }
}

std::vector<AppId> to_apps(const Section& s, std::string_view key) {
    std::vector<AppId> apps;
    const auto v = s.get(key);
    if (!v || trim(*v).empty()) return apps;
    std::string_view rest = *v;
    while (true) {
        const auto comma = rest.find(',');
        const auto name = trim(rest.substr(0, comma));
        if (name.empty()) throw ConfigError(field_name(s, key), "empty app name in list");
        apps.emplace_back(std::string(name));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return apps;
}

void require_sections(const Document& doc, std::initializer_list<std::string_view> allowed) {
    for (const auto& s : doc.sections) {
        bool ok = false;
        for (auto a : allowed) ok = ok || s.name == a;
        if (!ok && !(s.name.empty() && s.entries.empty()))
            throw ConfigError(s.name.empty() ? "(top level)" : s.name,
                              fmt::format("unexpected section (line {})", s.line));
    }
}

}  // namespace

std::optional<std::string> Section::get(std::string_view key) const {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it)
        if (it->key == key) return it->value;
    return std::nullopt;
}

std::vector<std::string> Section::all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (e.key == key) out.push_back(e.value);
    return out;
}

std::vector<const Section*> Document::find_all(std::string_view name) const {
    std::vector<const Section*> out;
    for (const auto& s : sections)
        if (s.name == name) out.push_back(&s);
    return out;
}

const Section* Document::find(std::string_view name) const {
    const auto all = find_all(name);
    return all.empty() ? nullptr : all.back();
}

Document parse(std::string_view text) {
    Document doc;
    doc.sections.push_back({"", 0, {}});
    std::size_t line_no = 0;
    std::size_t from = 0;
    while (from <= text.size()) {
        auto nl = text.find('\n', from);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = trim(text.substr(from, nl - from));
        from = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParseError(ParseError::Kind::Syntax, line_no, "expected '[section]'");
            doc.sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(ParseError::Kind::Syntax, line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError(ParseError::Kind::Syntax, line_no, "empty key");
        doc.sections.back().entries.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return doc;
}

simulate::Scenario scenario_from(const Document& doc) {
    require_sections(doc, {"scenario", "benign", "session", "injection"});
    simulate::Scenario sc;
    if (const auto* s = doc.find("scenario")) {
        reject_unknown(*s, {"duration", "seed", "start", "initial_screen", "apps", "foreground_apps"});
        sc.duration = to_int(*s, "duration", sc.duration);
        sc.seed = to_u64(*s, "seed", sc.seed);
        sc.start = to_time(*s, "start", sc.start);
        sc.initial_screen = to_bool(*s, "initial_screen", sc.initial_screen, "on", "off");
        sc.apps = to_apps(*s, "apps");
        sc.foreground_apps = to_apps(*s, "foreground_apps");
    }
    if (const auto* s = doc.find("benign")) {
        reject_unknown(*s, {"out_sms_gap", "in_sms_gap", "out_call_gap", "in_call_gap", "call_length", "launch_gap"});
        auto& b = sc.benign;
        b.out_sms_gap = to_int(*s, "out_sms_gap", b.out_sms_gap);
        b.in_sms_gap = to_int(*s, "in_sms_gap", b.in_sms_gap);
        b.out_call_gap = to_int(*s, "out_call_gap", b.out_call_gap);
        b.in_call_gap = to_int(*s, "in_call_gap", b.in_call_gap);
        b.call_length = to_int(*s, "call_length", b.call_length);
        b.launch_gap = to_int(*s, "launch_gap", b.launch_gap);
    }
    if (const auto* s = doc.find("session")) {
        reject_unknown(*s, {"on_mean", "off_mean", "fixed"});
        sc.session.on_mean = to_int(*s, "on_mean", sc.session.on_mean);
        sc.session.off_mean = to_int(*s, "off_mean", sc.session.off_mean);
        sc.session.fixed = to_bool(*s, "fixed", sc.session.fixed);
    }
    const auto injections = doc.find_all("injection");
    for (std::size_t i = 0; i < injections.size(); ++i) {
        const auto& s = *injections[i];
        reject_unknown(s, {"app", "behavior", "period", "start_offset"});
        const auto prefix = fmt::format("injection[{}]", i);
        const auto app = s.get("app");
        if (!app || app->empty()) throw ConfigError(prefix + ".app", "required");
        const auto behavior = s.get("behavior").value_or("");
        const auto period = to_int(s, "period", 60);
        simulate::Behavior b;
        if (behavior == "sms_while_idle") b = simulate::SmsWhileIdle{period};
        else if (behavior == "call_while_idle") b = simulate::CallWhileIdle{period};
        else if (behavior == "sms_during_call") b = simulate::SmsDuringCall{};
        else
            throw ConfigError(prefix + ".behavior",
                              fmt::format("expected sms_while_idle, call_while_idle or sms_during_call, got '{}'",
                                          behavior));
        sc.injections.push_back({AppId(*app), b, to_int(s, "start_offset", 0)});
    }
    simulate::validate_scenario(sc);
    return sc;
}

PipelineConfig pipeline_from(const Document& doc) {
    require_sections(doc, {"pipeline", "classifier", "model", "evaluate", "report"});
    PipelineConfig pc;
    if (const auto* s = doc.find("pipeline")) {
        reject_unknown(*s, {"tick"});
        pc.tick = to_int(*s, "tick", pc.tick);
        if (pc.tick <= 0) throw ConfigError("pipeline.tick", "must be > 0");
    }
    if (const auto* s = doc.find("classifier")) {
        reject_unknown(*s, {"k", "include_identifiers"});
        const auto k = to_int(*s, "k", 1);
        if (k < 1) throw ConfigError("classifier.k", "must be >= 1");
        pc.classifier.k = static_cast<std::size_t>(k);
        pc.classifier.include_identifiers = to_bool(*s, "include_identifiers", false);
    }
    if (const auto* s = doc.find("model")) {
        reject_unknown(*s, {"rules", "placeholder_app", "base_time"});
        pc.rules_file = s->get("rules");
        pc.placeholder_app = s->get("placeholder_app").value_or(pc.placeholder_app);
        if (pc.placeholder_app.empty()) throw ConfigError("model.placeholder_app", "must not be empty");
        pc.base_time = to_time(*s, "base_time", pc.base_time);
    }
    if (const auto* s = doc.find("evaluate")) {
        reject_unknown(*s, {"folds", "seed"});
        const auto folds = to_int(*s, "folds", 10);
        if (folds < 2) throw ConfigError("evaluate.folds", "must be >= 2");
        pc.folds = static_cast<std::size_t>(folds);
        pc.seed = to_u64(*s, "seed", pc.seed);
    }
    for (const auto* s : doc.find_all("report")) {
        reject_unknown(*s, {"sink"});
        for (const auto& v : s->all("sink")) pc.sinks.push_back(report::SinkSpec::parse(v));
    }
    return pc;
}

}  // namespace appwatch::config
