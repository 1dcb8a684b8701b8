#include "hfbi/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hfbi/errors.hpp"

namespace hfbi {

namespace {

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

std::int64_t parse_int(std::string_view field, const std::string& source, std::size_t line,
                       const char* what) {
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ParseError(where(source, line) + "bad " + what + " '" + std::string(field) + "'");
    return value;
}

bool parse_bool(std::string_view field, const std::string& source, std::size_t line) {
    if (field == "0" || field == "false") return false;
    if (field == "1" || field == "true") return true;
    throw ParseError(where(source, line) + "bad incentive flag '" + std::string(field) + "'");
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

ActivityLog ActivityLog::from_records(std::vector<ParticipationRecord> records) {
    if (records.empty()) throw ValidationError("activity log: no records");

    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.activity_id != b.activity_id) return a.activity_id < b.activity_id;
        return a.participant_id < b.participant_id;
    });

    std::int64_t max_activity = 0;
    for (const auto& r : records) {
        if (r.activity_id < 0) throw ValidationError("activity log: negative activity id");
        if (r.participant_id < 0) throw ValidationError("activity log: negative participant id");
        max_activity = std::max(max_activity, r.activity_id);
    }

    ActivityLog log;
    log.activity_count_ = max_activity + 1;
    log.incentive_flag_.assign(static_cast<std::size_t>(log.activity_count_), 0);
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(log.activity_count_), 0);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto a = static_cast<std::size_t>(r.activity_id);
        if (i > 0 && records[i - 1].activity_id == r.activity_id &&
            records[i - 1].participant_id == r.participant_id) {
            throw ValidationError("activity log: duplicate attendance (participant " +
                                  std::to_string(r.participant_id) + ", activity " +
                                  std::to_string(r.activity_id) + ")");
        }
        if (seen[a] && (log.incentive_flag_[a] != 0) != r.incentive) {
            throw ValidationError("activity log: conflicting incentive flag for activity " +
                                  std::to_string(r.activity_id));
        }
        seen[a] = 1;
        log.incentive_flag_[a] = r.incentive ? 1 : 0;
    }

    for (std::int64_t a = 0; a < log.activity_count_; ++a) {
        if (!seen[static_cast<std::size_t>(a)]) {
            throw ValidationError("activity log: activity " + std::to_string(a) +
                                  " has no records (ids must be contiguous from 0)");
        }
    }

    for (std::int64_t a = 0; a < log.activity_count_; ++a) {
        if (log.incentive_flag_[static_cast<std::size_t>(a)]) log.incentive_ids_.push_back(a);
    }

    // Users and per-user attendance lists (activity order = ascending).
    for (const auto& r : records) {
        auto [it, inserted] = log.user_index_.try_emplace(r.participant_id, log.attendance_.size());
        if (inserted) log.attendance_.emplace_back();
        log.attendance_[it->second].push_back(r.activity_id);
    }
    log.user_ids_.reserve(log.user_index_.size());
    for (const auto& [id, idx] : log.user_index_) log.user_ids_.push_back(id);
    std::sort(log.user_ids_.begin(), log.user_ids_.end());

    log.records_ = std::move(records);
    return log;
}

const std::vector<std::int64_t>& ActivityLog::attendances(std::int64_t user) const {
    auto it = user_index_.find(user);
    if (it == user_index_.end())
        throw ValidationError("activity log: unknown participant " + std::to_string(user));
    return attendance_[it->second];
}

bool ActivityLog::is_incentive(std::int64_t activity) const {
    if (activity < 0 || activity >= activity_count_)
        throw ValidationError("activity log: activity " + std::to_string(activity) +
                              " out of range");
    return incentive_flag_[static_cast<std::size_t>(activity)] != 0;
}

ActivityLog parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return parse_csv(in, path.string());
}

ActivityLog parse_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError(where(source_name, 1) + "empty input");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "participant_id,activity_id,team_id,incentive") {
        throw ParseError(where(source_name, line_no) +
                         "expected header 'participant_id,activity_id,team_id,incentive'");
    }

    std::vector<ParticipationRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != 4)
            throw ParseError(where(source_name, line_no) + "expected 4 fields, got " +
                             std::to_string(fields.size()));
        ParticipationRecord r;
        r.participant_id = parse_int(fields[0], source_name, line_no, "participant_id");
        r.activity_id = parse_int(fields[1], source_name, line_no, "activity_id");
        if (!fields[2].empty())
            r.team_id = parse_int(fields[2], source_name, line_no, "team_id");
        r.incentive = parse_bool(fields[3], source_name, line_no);
        records.push_back(r);
    }
    if (records.empty()) throw ParseError(where(source_name, line_no) + "no data rows");

    try {
        return ActivityLog::from_records(std::move(records));
    } catch (const ValidationError& e) {
        throw ParseError(source_name + ": " + e.what());
    }
}

void write_csv(const ActivityLog& log, std::ostream& out) {
    out << "participant_id,activity_id,team_id,incentive\n";
    for (const auto& r : log.records()) {
        out << r.participant_id << ',' << r.activity_id << ',';
        if (r.team_id) out << *r.team_id;
        out << ',' << (r.incentive ? 1 : 0) << '\n';
    }
}

void write_csv(const ActivityLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    write_csv(log, out);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

FrequencySequence frequency_sequence(const ActivityLog& log, std::optional<std::int64_t> upto) {
    const std::int64_t limit = upto.value_or(log.activity_count() - 1);
    if (limit < 0 || limit >= log.activity_count())
        throw ValidationError("frequency_sequence: upto out of range");

    FrequencySequence out;
    for (std::int64_t user : log.user_ids()) {
        const auto& acts = log.attendances(user);
        auto end = std::upper_bound(acts.begin(), acts.end(), limit);
        auto count = static_cast<std::int64_t>(end - acts.begin());
        if (count > 0) out.push_back(count);
    }
    return out;
}

IntervalSequence interval_sequence(const ActivityLog& log, std::int64_t user) {
    const auto& acts = log.attendances(user);
    if (acts.size() < 2)
        throw ValidationError("interval_sequence: participant " + std::to_string(user) +
                              " has fewer than two attendances");
    IntervalSequence seq;
    seq.user_id = user;
    seq.intervals.reserve(acts.size() - 1);
    for (std::size_t i = 1; i < acts.size(); ++i)
        seq.intervals.push_back(acts[i] - acts[i - 1]);
    return seq;
}

ActivityLog prefix(const ActivityLog& log, std::int64_t upto) {
    if (upto < 0 || upto >= log.activity_count())
        throw ValidationError("prefix: upto out of range");
    std::vector<ParticipationRecord> kept;
    for (const auto& r : log.records())
        if (r.activity_id <= upto) kept.push_back(r);
    return ActivityLog::from_records(std::move(kept));
}

std::int64_t users_reaching(const ActivityLog& log, std::int64_t population) {
    if (population < 1) throw ValidationError("users_reaching: population must be >= 1");
    std::unordered_map<std::int64_t, bool> seen;
    std::int64_t distinct = 0;
    for (const auto& r : log.records()) {  // sorted by activity id
        auto [it, inserted] = seen.try_emplace(r.participant_id, true);
        if (inserted && ++distinct >= population) return r.activity_id;
    }
    throw ValidationError("users_reaching: log never reaches " + std::to_string(population) +
                          " users");
}

}  // namespace hfbi
