#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "teampulse/errors.hpp"
#include "teampulse/transcript.hpp"

using namespace teampulse;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

json trio_doc() { return json::parse(read_file("tests/fixtures/transcript_trio.json")); }

}  // namespace

TEST_CASE("rfc3339 round-trips and accepts offsets") {
    Timestamp t = parse_rfc3339("2026-01-05T09:00:12Z");
    CHECK(format_rfc3339(t) == "2026-01-05T09:00:12Z");

    CHECK(parse_rfc3339("2026-01-05T10:00:12+01:00") == t);
    CHECK(parse_rfc3339("2026-01-05 09:00:12Z") == t);

    Timestamp frac = parse_rfc3339("2026-01-05T09:00:12.250Z");
    CHECK((frac - t) == std::chrono::milliseconds(250));

    CHECK_THROWS_AS(parse_rfc3339("not a timestamp"), ParseError);
    CHECK_THROWS_AS(parse_rfc3339("2026-13-05T09:00:12Z"), ParseError);
}

TEST_CASE("canonical transcript parses with members and sorted messages") {
    json doc = trio_doc();
    // Shuffle message order on the wire; parsing must restore time order.
    std::swap(doc["messages"][0], doc["messages"][5]);
    Transcript t = parse_transcript(doc.dump(), {});

    CHECK(t.channel_id == "team-alpha");
    CHECK(t.members.size() == 3);
    CHECK(t.messages.size() == 12);
    for (std::size_t i = 1; i < t.messages.size(); ++i)
        CHECK(t.messages[i - 1].timestamp <= t.messages[i].timestamp);
}

TEST_CASE("whitespace-only messages are dropped but counted") {
    json doc = trio_doc();
    doc["messages"].push_back({{"sender_id", "u-ada"},
                               {"ts", "2026-01-05T09:06:00Z"},
                               {"text", "   \n\t "}});
    Transcript t = parse_transcript(doc.dump(), {});
    CHECK(t.messages.size() == 12);
    CHECK(t.dropped_empty_messages == 1);
}

TEST_CASE("unknown sender and empty transcript are parse errors") {
    json doc = trio_doc();
    doc["messages"][0]["sender_id"] = "u-ghost";
    CHECK_THROWS_AS(parse_transcript(doc.dump(), {}), SchemaError);

    json empty = trio_doc();
    empty["messages"] = json::array();
    CHECK_THROWS_AS(parse_transcript(empty.dump(), {}), DegenerateTranscriptError);

    CHECK_THROWS_AS(parse_transcript("{not json", {}), ParseError);
}

TEST_CASE("agent messages are filtered out when configured") {
    json doc = trio_doc();
    doc["members"].push_back({{"id", "u-bot"}, {"alias", "coach"}});
    doc["messages"].push_back({{"sender_id", "u-bot"},
                               {"ts", "2026-01-05T09:06:00Z"},
                               {"text", "Here is your feedback."}});
    ParseOptions opts;
    opts.agent_sender_id = "u-bot";
    Transcript t = parse_transcript(doc.dump(), opts);
    CHECK(t.messages.size() == 12);
    for (const auto& msg : t.messages) CHECK(msg.sender_id != "u-bot");
}

TEST_CASE("member views partition the message list") {
    Transcript t = parse_transcript(trio_doc().dump(), {});
    std::size_t covered = 0;
    for (const auto& m : t.members) {
        MemberView view = member_view(t, m.id);
        covered += view.messages.size();
        for (const auto& msg : view.messages) CHECK(msg.sender_id == m.id);
        // Order within a view matches transcript order.
        for (std::size_t i = 1; i < view.messages.size(); ++i)
            CHECK(view.messages[i - 1].timestamp <= view.messages[i].timestamp);
    }
    CHECK(covered == t.messages.size());
    CHECK_THROWS_AS(member_view(t, "u-ghost"), NotFoundError);
}

TEST_CASE("serialization round-trips the parsed form") {
    Transcript t = parse_transcript(trio_doc().dump(), {});
    Transcript again = parse_transcript(serialize_transcript(t), {});
    CHECK(again.channel_id == t.channel_id);
    CHECK(again.task_goal == t.task_goal);
    REQUIRE(again.messages.size() == t.messages.size());
    for (std::size_t i = 0; i < t.messages.size(); ++i) {
        CHECK(again.messages[i].sender_id == t.messages[i].sender_id);
        CHECK(again.messages[i].timestamp == t.messages[i].timestamp);
        CHECK(again.messages[i].text == t.messages[i].text);
    }
}

TEST_CASE("chat-export format maps users and epoch timestamps") {
    json export_doc = json::array();
    export_doc.push_back({{"user", "U111"},
                          {"ts", "1767606012.000100"},
                          {"text", "hello team"},
                          {"user_profile", {{"display_name", "alias-1"}}}});
    export_doc.push_back({{"user", "U222"},
                          {"ts", "1767606030.000000"},
                          {"text", "hi there"},
                          {"user_profile", {{"display_name", "alias-2"}}}});
    export_doc.push_back({{"user", "U111"},
                          {"subtype", "channel_join"},
                          {"ts", "1767605000.000000"},
                          {"text", "joined the channel"}});
    ParseOptions opts;
    opts.format = TranscriptFormat::chat_export;
    Transcript t = parse_transcript(export_doc.dump(), opts);
    CHECK(t.members.size() == 2);
    CHECK(t.messages.size() == 2);  // join event excluded
    CHECK(t.messages.front().text == "hello team");
    CHECK(format_rfc3339(t.messages.front().timestamp).substr(0, 4) == "2026");
}

TEST_CASE("formatted conversation lines carry alias and timestamp") {
    Transcript t = parse_transcript(trio_doc().dump(), {});
    std::string convo = format_conversation(t);
    CHECK(convo.find("alias-1:") != std::string::npos);
    CHECK(convo.find("[2026-01-05T09:00:12Z]") != std::string::npos);
    // Real ids never leak into prompt-facing text.
    CHECK(convo.find("u-ada") == std::string::npos);

    std::string script = format_member_script(t, "u-ada");
    CHECK(script.find("alias-1") != std::string::npos);
    CHECK(script.find("alias-2") == std::string::npos);
}
