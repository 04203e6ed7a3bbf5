#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace teampulse {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Parses an RFC-3339 timestamp ("2024-05-01T12:00:00Z", offsets and
/// fractional seconds allowed) and normalizes it to UTC.
Timestamp parse_rfc3339(const std::string& text);

/// Formats a UTC timestamp back to RFC-3339 with a trailing 'Z'.
std::string format_rfc3339(Timestamp ts);

struct Message {
    std::string sender_id;
    std::string sender_alias;
    Timestamp timestamp{};
    std::string text;  // non-empty after trimming
    std::string channel_id;

    bool operator==(const Message&) const = default;
};

struct Member {
    std::string id;
    std::string alias;

    bool operator==(const Member&) const = default;
};

/// Ordered, timestamped team conversation. Immutable after parse; safe to
/// share across threads.
struct Transcript {
    std::string channel_id;
    std::string task_goal;
    std::vector<Member> members;             // non-empty
    std::vector<Message> messages;           // sorted non-decreasing by timestamp
    std::size_t dropped_empty_messages = 0;  // whitespace-only inputs dropped at parse

    const Member* find_member(const std::string& id) const;
};

/// A member's messages, in transcript order. Views over a transcript
/// partition its message set.
struct MemberView {
    std::string member;
    std::vector<Message> messages;
};

enum class TranscriptFormat { canonical_json, chat_export };

struct ParseOptions {
    TranscriptFormat format = TranscriptFormat::canonical_json;
    /// When set, messages from this sender (the agent's own identity) are
    /// excluded before analysis.
    std::optional<std::string> agent_sender_id;
};

/// Parses raw bytes into a canonical Transcript. Messages are re-sorted by
/// timestamp if needed and whitespace-only messages are dropped (counted in
/// dropped_empty_messages). Throws ParseError, SchemaError, or
/// DegenerateTranscriptError.
Transcript parse_transcript(const std::string& raw, const ParseOptions& opts = {});

/// Serializes to the canonical JSON schema (schema_version 1).
std::string serialize_transcript(const Transcript& t);

/// Exactly the messages authored by `member`, order preserved. Throws
/// NotFoundError for an unknown member; a known member with no messages
/// yields an empty view.
MemberView member_view(const Transcript& t, const std::string& member);

/// Concatenated message text for one member (the per-member transcript).
std::string member_text(const Transcript& t, const std::string& member);

/// Concatenated message text for the whole team.
std::string team_text(const Transcript& t);

/// "[ts] alias: text" lines for prompt embedding.
std::string format_conversation(const Transcript& t);
std::string format_member_script(const Transcript& t, const std::string& member);

}  // namespace teampulse
