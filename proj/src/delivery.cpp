#include "teampulse/delivery.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <sstream>

#include "httplib/httplib.h"
#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"

namespace teampulse {

namespace {

// Splits "https://host[:port]/path" into origin and path for the HTTP client.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string idempotency_key(const std::string& cycle_id, const std::string& audience) {
    return cycle_id + "/" + audience;
}

}  // namespace

OutboundMessage format_outbound(const FeedbackMessage& msg, const Routing& routing,
                                const std::vector<Member>& members) {
    OutboundMessage out;
    out.body = msg.raw_text;
    if (msg.audience == Audience::team) {
        out.target.kind = DeliveryTarget::Kind::channel_public;
        out.target.channel_id = routing.channel_id;
        out.mention_all = true;
        for (const auto& m : members) out.mentions.push_back(m.id);
    } else {
        out.target.kind = DeliveryTarget::Kind::member_private;
        out.target.channel_id = routing.channel_id;
        out.target.member_id = msg.member_id;
    }
    return out;
}

DeliveryReport deliver(const std::vector<FeedbackMessage>& msgs, const Routing& routing,
                       const std::vector<Member>& members, ChatAdapter& adapter,
                       DeliveryLedger& ledger, const std::string& cycle_id,
                       bool deliver_invalid) {
    DeliveryReport report;
    // Team message first, then individual messages in input order.
    std::vector<const FeedbackMessage*> ordered;
    for (const auto& m : msgs)
        if (m.audience == Audience::team) ordered.push_back(&m);
    for (const auto& m : msgs)
        if (m.audience != Audience::team) ordered.push_back(&m);

    for (const auto* m : ordered) {
        DeliveryReport::Entry entry;
        entry.audience = m->audience == Audience::team
                             ? "team"
                             : "member:" + m->member_id;
        entry.kind = m->audience == Audience::team
                         ? DeliveryTarget::Kind::channel_public
                         : DeliveryTarget::Kind::member_private;
        if (!m->valid() && !deliver_invalid) {
            entry.ok = false;
            entry.detail = "skipped: failed validation";
            report.entries.push_back(std::move(entry));
            continue;
        }
        const std::string key = idempotency_key(cycle_id, entry.audience);
        if (ledger.already_sent(key)) {
            entry.ok = true;
            entry.skipped_duplicate = true;
            entry.detail = "skipped: already delivered for this cycle";
            report.entries.push_back(std::move(entry));
            continue;
        }
        OutboundMessage out = format_outbound(*m, routing, members);
        out.body = adapter.escape(out.body);
        SendOutcome outcome = adapter.send(out);
        entry.ok = outcome.ok;
        entry.detail = outcome.detail;
        if (outcome.ok) ledger.mark_sent(key);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

SendOutcome DryRunAdapter::send(const OutboundMessage& msg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) return {false, "cannot create directory: " + ec.message()};
    std::string label = msg.target.kind == DeliveryTarget::Kind::channel_public
                            ? "team"
                            : "member-" + msg.target.member_id;
    std::ostringstream name;
    name << std::setw(3) << std::setfill('0') << seq_++ << "-" << label << ".md";
    fs::path path = fs::path(dir_) / name.str();
    std::ofstream out(path);
    if (!out) return {false, "cannot open " + path.string()};
    out << "<!-- target: "
        << (msg.target.kind == DeliveryTarget::Kind::channel_public ? "channel:" + msg.target.channel_id
                                                                    : "private:" + msg.target.member_id)
        << " -->\n";
    if (msg.mention_all && !msg.mentions.empty()) {
        out << "<!-- mentions:";
        for (const auto& id : msg.mentions) out << " " << id;
        out << " -->\n";
    }
    out << msg.body;
    if (!msg.body.ends_with('\n')) out << '\n';
    out.close();
    return {true, path.string()};
}

SendOutcome WebhookAdapter::send(const OutboundMessage& msg) {
    auto [origin, path] = split_url(url_);
    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    nlohmann::json payload;
    payload["target"] = msg.target.kind == DeliveryTarget::Kind::channel_public
                            ? "channel:" + msg.target.channel_id
                            : "private:" + msg.target.member_id;
    payload["text"] = msg.body;
    payload["mentions"] = msg.mentions;
    auto res = client.Post(path, payload.dump(), "application/json");
    if (!res) return {false, "transport error: " + httplib::to_string(res.error())};
    if (res->status < 200 || res->status >= 300)
        return {false, "http status " + std::to_string(res->status)};
    return {true, ""};
}

std::string WorkspaceApiAdapter::escape(const std::string& body) const {
    std::string out;
    out.reserve(body.size());
    for (char c : body) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

SendOutcome WorkspaceApiAdapter::send(const OutboundMessage& msg) {
    const char* token = std::getenv(token_env_.c_str());
    if (token == nullptr || *token == '\0')
        return {false, "credential environment variable " + token_env_ + " is not set"};

    auto [origin, base_path] = split_url(base_url_);
    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    httplib::Headers headers{{"Authorization", std::string("Bearer ") + token}};

    std::string body = msg.body;
    nlohmann::json payload;
    std::string path = base_path;
    if (path.ends_with('/')) path.pop_back();
    if (msg.target.kind == DeliveryTarget::Kind::channel_public) {
        if (msg.mention_all && !msg.mentions.empty()) {
            std::string prefix;
            for (const auto& id : msg.mentions) prefix += "<@" + id + "> ";
            body = prefix + "\n" + body;
        }
        payload["channel"] = msg.target.channel_id;
        payload["text"] = body;
        path += "/chat.postMessage";
    } else if (mode_ == PrivateMode::ephemeral) {
        payload["channel"] = msg.target.channel_id;
        payload["user"] = msg.target.member_id;
        payload["text"] = body;
        path += "/chat.postEphemeral";
    } else {
        payload["channel"] = msg.target.member_id;  // DM channel keyed by user id
        payload["text"] = body;
        path += "/chat.postMessage";
    }
    auto res = client.Post(path, headers, payload.dump(), "application/json");
    if (!res) return {false, "transport error: " + httplib::to_string(res.error())};
    if (res->status < 200 || res->status >= 300)
        return {false, "http status " + std::to_string(res->status)};
    // The workspace API reports logical errors in-body with 200s.
    try {
        auto j = nlohmann::json::parse(res->body);
        if (j.contains("ok") && !j["ok"].get<bool>())
            return {false, "api error: " + j.value("error", std::string("unknown"))};
    } catch (const nlohmann::json::exception&) {
        // Non-JSON success bodies are accepted (plain webhook-style "ok").
    }
    return {true, ""};
}

}  // namespace teampulse
