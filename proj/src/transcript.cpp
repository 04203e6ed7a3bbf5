#include "teampulse/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"

namespace teampulse {

using nlohmann::json;

namespace {

// Howard Hinnant's days-from-civil; chrono calendar conversions without
// relying on the local timezone database.
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Timestamp parse_rfc3339(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h,
                    &mi, &se, &consumed) != 6) {
        // Some exports use a space separator.
        if (std::sscanf(text.c_str(), "%4d-%2d-%2d %2d:%2d:%2d%n", &y, &mo, &d,
                        &h, &mi, &se, &consumed) != 6)
            throw ParseError("unparseable timestamp '" + text + "'", 0);
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60)
        throw ParseError("timestamp field out of range in '" + text + "'", 0);

    std::size_t pos = static_cast<std::size_t>(consumed);
    long millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        std::string frac = text.substr(start, pos - start);
        if (frac.empty()) throw ParseError("empty fractional seconds in '" + text + "'", start);
        frac.resize(3, '0');
        millis = std::stol(frac.substr(0, 3));
    }

    long offset_sec = 0;
    if (pos >= text.size())
        throw ParseError("timestamp missing timezone in '" + text + "'", pos);
    char z = text[pos];
    if (z == 'Z' || z == 'z') {
        // UTC
    } else if (z == '+' || z == '-') {
        int oh = 0, om = 0;
        if (std::sscanf(text.c_str() + pos + 1, "%2d:%2d", &oh, &om) != 2 &&
            std::sscanf(text.c_str() + pos + 1, "%2d%2d", &oh, &om) != 2)
            throw ParseError("bad timezone offset in '" + text + "'", pos);
        offset_sec = (oh * 3600L + om * 60L) * (z == '+' ? 1 : -1);
    } else {
        throw ParseError("timestamp missing timezone in '" + text + "'", pos);
    }

    std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    std::int64_t secs = days * 86400 + h * 3600 + mi * 60 + se - offset_sec;
    return Timestamp(std::chrono::milliseconds(secs * 1000 + millis));
}

std::string format_rfc3339(Timestamp ts) {
    using namespace std::chrono;
    auto total_ms = ts.time_since_epoch().count();
    std::int64_t ms = ((total_ms % 1000) + 1000) % 1000;
    std::int64_t secs = (total_ms - ms) / 1000;
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }

    // civil-from-days (Hinnant)
    std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    const std::int64_t year = y + (m <= 2);

    char buf[40];
    if (ms != 0)
        std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                      static_cast<long long>(year), m, d,
                      static_cast<long long>(rem / 3600),
                      static_cast<long long>((rem % 3600) / 60),
                      static_cast<long long>(rem % 60), static_cast<long long>(ms));
    else
        std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                      static_cast<long long>(year), m, d,
                      static_cast<long long>(rem / 3600),
                      static_cast<long long>((rem % 3600) / 60),
                      static_cast<long long>(rem % 60));
    return buf;
}

const Member* Transcript::find_member(const std::string& id) const {
    for (const auto& m : members)
        if (m.id == id) return &m;
    return nullptr;
}

namespace {

json parse_json_or_throw(const std::string& raw) {
    try {
        return json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
}

Transcript from_canonical(const json& doc) {
    Transcript t;
    if (!doc.is_object()) throw SchemaError("canonical transcript must be a JSON object");
    t.channel_id = doc.value("channel_id", "");
    t.task_goal = doc.value("task_goal", "");
    if (!doc.contains("members") || !doc["members"].is_array() || doc["members"].empty())
        throw SchemaError("canonical transcript requires a non-empty members array");
    for (const auto& m : doc["members"]) {
        Member member{m.at("id").get<std::string>(), m.value("alias", "")};
        if (member.alias.empty()) member.alias = member.id;
        t.members.push_back(std::move(member));
    }
    if (!doc.contains("messages") || !doc["messages"].is_array())
        throw SchemaError("canonical transcript requires a messages array");
    for (const auto& m : doc["messages"]) {
        Message msg;
        msg.sender_id = m.at("sender_id").get<std::string>();
        msg.timestamp = parse_rfc3339(m.at("ts").get<std::string>());
        msg.text = m.at("text").get<std::string>();
        msg.channel_id = t.channel_id;
        const Member* member = t.find_member(msg.sender_id);
        if (!member)
            throw SchemaError("message references unknown sender '" + msg.sender_id + "'");
        msg.sender_alias = member->alias;
        t.messages.push_back(std::move(msg));
    }
    return t;
}

// Workspace-export layout: an array of {user, ts, text} objects, with `ts`
// as epoch seconds ("1714564800.000100") or RFC-3339. Members are derived
// from the senders seen; an optional wrapper object may carry channel/goal.
Transcript from_chat_export(const json& doc) {
    Transcript t;
    const json* msgs = nullptr;
    if (doc.is_array()) {
        msgs = &doc;
    } else if (doc.is_object() && doc.contains("messages")) {
        msgs = &doc["messages"];
        t.channel_id = doc.value("channel", doc.value("channel_id", ""));
        t.task_goal = doc.value("task_goal", "");
    } else {
        throw SchemaError("chat export must be a message array or {channel, messages}");
    }

    std::set<std::string> seen;
    for (const auto& m : *msgs) {
        if (m.value("subtype", "") == "channel_join") continue;
        Message msg;
        msg.sender_id = m.value("user", m.value("sender_id", ""));
        if (msg.sender_id.empty())
            throw SchemaError("chat-export message without a user field");
        if (m.contains("user_profile") && m["user_profile"].contains("display_name"))
            msg.sender_alias = m["user_profile"]["display_name"].get<std::string>();
        else
            msg.sender_alias = msg.sender_id;
        std::string ts = m.at("ts").get<std::string>();
        if (ts.find('T') == std::string::npos && ts.find('-') == std::string::npos) {
            double epoch = std::stod(ts);
            msg.timestamp = Timestamp(
                std::chrono::milliseconds(static_cast<std::int64_t>(epoch * 1000.0 + 0.5)));
        } else {
            msg.timestamp = parse_rfc3339(ts);
        }
        msg.text = m.value("text", "");
        msg.channel_id = t.channel_id;
        if (seen.insert(msg.sender_id).second)
            t.members.push_back({msg.sender_id, msg.sender_alias});
        t.messages.push_back(std::move(msg));
    }
    if (t.members.empty()) throw SchemaError("chat export contains no senders");
    return t;
}

}  // namespace

Transcript parse_transcript(const std::string& raw, const ParseOptions& opts) {
    json doc = parse_json_or_throw(raw);
    Transcript t = opts.format == TranscriptFormat::canonical_json ? from_canonical(doc)
                                                                   : from_chat_export(doc);

    if (opts.agent_sender_id) {
        std::erase_if(t.messages,
                      [&](const Message& m) { return m.sender_id == *opts.agent_sender_id; });
        std::erase_if(t.members,
                      [&](const Member& m) { return m.id == *opts.agent_sender_id; });
        if (t.members.empty()) throw SchemaError("all members filtered as agent identity");
    }

    std::size_t before = t.messages.size();
    std::erase_if(t.messages, [](const Message& m) { return trim(m.text).empty(); });
    t.dropped_empty_messages = before - t.messages.size();

    if (t.messages.empty())
        throw DegenerateTranscriptError("transcript has zero non-empty messages");

    std::stable_sort(t.messages.begin(), t.messages.end(),
                     [](const Message& a, const Message& b) { return a.timestamp < b.timestamp; });
    return t;
}

std::string serialize_transcript(const Transcript& t) {
    json doc;
    doc["schema_version"] = 1;
    doc["channel_id"] = t.channel_id;
    doc["task_goal"] = t.task_goal;
    doc["members"] = json::array();
    for (const auto& m : t.members) doc["members"].push_back({{"id", m.id}, {"alias", m.alias}});
    doc["messages"] = json::array();
    for (const auto& m : t.messages)
        doc["messages"].push_back({{"sender_id", m.sender_id},
                                   {"ts", format_rfc3339(m.timestamp)},
                                   {"text", m.text}});
    return doc.dump(2);
}

MemberView member_view(const Transcript& t, const std::string& member) {
    if (!t.find_member(member)) throw NotFoundError("unknown member '" + member + "'");
    MemberView view{member, {}};
    for (const auto& m : t.messages)
        if (m.sender_id == member) view.messages.push_back(m);
    return view;
}

std::string member_text(const Transcript& t, const std::string& member) {
    std::string out;
    for (const auto& m : member_view(t, member).messages) {
        if (!out.empty()) out += '\n';
        out += m.text;
    }
    return out;
}

std::string team_text(const Transcript& t) {
    std::string out;
    for (const auto& m : t.messages) {
        if (!out.empty()) out += '\n';
        out += m.text;
    }
    return out;
}

std::string format_conversation(const Transcript& t) {
    std::ostringstream os;
    for (const auto& m : t.messages)
        os << "[" << format_rfc3339(m.timestamp) << "] " << m.sender_alias << ": " << m.text
           << "\n";
    return os.str();
}

std::string format_member_script(const Transcript& t, const std::string& member) {
    std::ostringstream os;
    for (const auto& m : member_view(t, member).messages)
        os << "[" << format_rfc3339(m.timestamp) << "] " << m.sender_alias << ": " << m.text
           << "\n";
    return os.str();
}

}  // namespace teampulse
