#include "appwatch/report.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include "httplib.h"

#include "appwatch/error.hpp"

namespace appwatch::report {

namespace {

struct Url {
    std::string origin;  // http://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    const auto after_scheme = url.find("://");
    const auto slash = url.find('/', after_scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

std::optional<std::string> post(const std::string& url, const std::string& body) {
    const auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    client.set_connection_timeout(3, 0);
    client.set_read_timeout(5, 0);
    client.set_write_timeout(5, 0);
    const auto res = client.Post(path, body, "application/json");
    if (!res) return fmt::format("POST {} failed: {}", url, httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) return fmt::format("POST {} answered HTTP {}", url, res->status);
    return std::nullopt;
}

}  // namespace

SinkSpec SinkSpec::parse(std::string_view text) {
    if (text == "stdout") return {Kind::Stdout, {}};
    if (text.starts_with("file:") && text.size() > 5) return {Kind::File, std::string(text.substr(5))};
    if (text.starts_with("http://") && text.size() > 7) return {Kind::Http, std::string(text)};
    throw ConfigError("sink", fmt::format("expected 'stdout', 'file:<path>' or 'http://...', got '{}'", text));
}

std::string SinkSpec::describe() const {
    switch (kind) {
        case Kind::Stdout: return "stdout";
        case Kind::File: return "file:" + target;
        case Kind::Http: return target;
    }
    return target;
}

DetectionReport build(const arff::Document& labeled, std::span<const knn::Prediction> predictions) {
    if (labeled.rows.size() != predictions.size())
        throw Error(fmt::format("{} rows but {} predictions", labeled.rows.size(), predictions.size()));
    DetectionReport r;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto p = knn::point_from_row(labeled.rows[i]);
        InstanceResult row;
        if (p.time) row.time = Timestamp(*p.time);
        row.app = p.app;
        row.bits = p.bits;
        row.predicted = predictions[i].label;
        row.nearest = predictions[i].neighbors.front();
        if (row.time && (!r.generated_at || *row.time > *r.generated_at)) r.generated_at = row.time;
        if (row.predicted == FeatureClass::Malicious) {
            ++r.malicious;
            const std::string app = row.app.value_or("?");
            if (std::find(r.flagged_apps.begin(), r.flagged_apps.end(), app) == r.flagged_apps.end())
                r.flagged_apps.push_back(app);
        } else {
            ++r.normal;
        }
        r.instances.push_back(std::move(row));
    }
    return r;
}

nlohmann::json to_json(const DetectionReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.instances) {
        nlohmann::json bits = nlohmann::json::object();
        for (auto f : kAllFeatures) {
            const auto& b = row.bits[static_cast<std::size_t>(f)];
            bits[std::string(feature_name(f))] = b ? nlohmann::json(*b ? 1 : 0) : nlohmann::json(nullptr);
        }
        rows.push_back({{"time", row.time ? nlohmann::json(format_date(*row.time)) : nlohmann::json(nullptr)},
                        {"app", row.app ? nlohmann::json(*row.app) : nlohmann::json(nullptr)},
                        {"bits", bits},
                        {"predicted", to_string(row.predicted)},
                        {"nearest_neighbor", row.nearest}});
    }
    return {
        {"generated_at", r.generated_at ? nlohmann::json(format_date(*r.generated_at)) : nlohmann::json(nullptr)},
        {"summary",
         {{"instances", r.instances.size()},
          {"normal", r.normal},
          {"malicious", r.malicious},
          {"flagged_apps", r.flagged_apps.size()}}},
        {"flagged_apps", r.flagged_apps},
        {"instances", rows},
    };
}

std::string notification_text(const DetectionReport& r) {
    std::string out;
    for (const auto& row : r.instances) {
        if (row.predicted != FeatureClass::Malicious) continue;
        out += fmt::format("MALICIOUS: {} at {}\n", row.app.value_or("?"),
                           row.time ? format_date(*row.time) : std::string("?"));
    }
    out += fmt::format("classified {} instance(s): {} Normal, {} Malicious; flagged apps: {}\n", r.instances.size(),
                       r.normal, r.malicious, r.flagged_apps.empty() ? "none" : fmt::format("{}", fmt::join(r.flagged_apps, ", ")));
    return out;
}

std::vector<DeliveryFailure> dispatch(std::span<const SinkSpec> sinks, const Payload& payload, std::ostream& out) {
    std::vector<DeliveryFailure> failures;
    for (const auto& sink : sinks) {
        switch (sink.kind) {
            case SinkSpec::Kind::Stdout:
                out << payload.text;
                out.flush();
                break;
            case SinkSpec::Kind::File: {
                std::ofstream file(sink.target, std::ios::binary | std::ios::trunc);
                if (!file || !(file << payload.json << '\n') || !file.flush())
                    failures.push_back({sink, fmt::format("cannot write '{}'", sink.target)});
                break;
            }
            case SinkSpec::Kind::Http:
                if (auto err = post(sink.target, payload.json)) failures.push_back({sink, *err});
                break;
        }
    }
    return failures;
}

}  // namespace appwatch::report
