// Copyright 2026 The Arena Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arena/store.h"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "arena/error.h"
#include "arena/json_io.h"
#include "spdlog/spdlog.h"

namespace arena {

namespace {

Error IoError(const std::filesystem::path& path, const std::string& what) {
  return Error(ErrorCode::kIo, path.string() + ": " + what + ": " + std::strerror(errno));
}

void WriteAll(int fd, const std::string& data, const std::filesystem::path& path) {
  size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError(path, "write");
    }
    off += static_cast<size_t>(n);
  }
}

void SyncDirectory(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

AppendLog::AppendLog(std::filesystem::path path) : path_(std::move(path)) { Open(); }

AppendLog::~AppendLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AppendLog::Open() {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError(path_, "open");
}

void AppendLog::Append(const std::string& line) {
  WriteAll(fd_, line + "\n", path_);
  if (::fsync(fd_) != 0) throw IoError(path_, "fsync");
}

std::vector<std::string> AppendLog::ReadLines() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw IoError(path_, "read");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string content = ss.str();
  std::vector<std::string> lines;
  size_t start = 0;
  while (true) {
    const size_t nl = content.find('\n', start);
    if (nl == std::string::npos) break;
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  if (start < content.size()) {
    spdlog::warn("{}: dropping {} byte torn tail", path_.string(), content.size() - start);
    if (::ftruncate(fd_, static_cast<off_t>(start)) != 0) throw IoError(path_, "truncate");
  }
  return lines;
}

void AppendLog::Rewrite(const std::vector<std::string>& lines) {
  std::filesystem::path tmp = path_;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError(tmp, "open");
  std::string data;
  for (const std::string& l : lines) data += l + "\n";
  try {
    WriteAll(fd, data, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    throw IoError(tmp, "fsync");
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path_.c_str()) != 0) throw IoError(path_, "rename");
  SyncDirectory(path_.parent_path());
  ::close(fd_);
  Open();
}

namespace {

template <typename T, typename Decode>
std::vector<T> DecodeLines(const std::vector<std::string>& lines, const Decode& decode,
                           const std::filesystem::path& path) {
  std::vector<T> out;
  out.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(decode(Json::parse(lines[i])));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchema,
                  path.string() + " line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(),
                  path.string() + " line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

// Only registration fields are persisted for evaluators; statistics are
// rebuilt from the match log.
Json RegistrationJson(const EvaluatorProfile& e) {
  EvaluatorProfile reg;
  reg.evaluator_id = e.evaluator_id;
  reg.mode = e.mode;
  reg.persona = e.persona;
  reg.qualified = e.qualified;
  reg.flagged = e.flagged;
  reg.flag_reasons = e.flag_reasons;
  return ToJson(reg);
}

std::string MosKey(const MosRecord& r) { return r.evaluator_id + "\x1f" + r.image_id; }

}  // namespace

Store::Store(std::filesystem::path data_dir)
    : dir_((std::filesystem::create_directories(data_dir), data_dir)),
      expert_log_(dir_ / "matches_expert.jsonl"),
      public_log_(dir_ / "matches_public.jsonl"),
      mos_log_(dir_ / "mos.jsonl"),
      evaluator_log_(dir_ / "evaluators.jsonl") {
  for (auto [log, vec] : {std::pair{&expert_log_, &expert_}, std::pair{&public_log_, &public_}}) {
    for (MatchRecord& m :
         DecodeLines<MatchRecord>(log->ReadLines(), MatchFromJson, log->path())) {
      if (!match_ids_.insert(m.match_id).second) {
        spdlog::warn("{}: duplicate match {} ignored", log->path().string(), m.match_id);
        continue;
      }
      vec->push_back(std::move(m));
    }
  }
  for (MosRecord& r : DecodeLines<MosRecord>(mos_log_.ReadLines(), MosFromJson, mos_log_.path())) {
    if (!mos_keys_.insert(MosKey(r)).second) continue;
    mos_.push_back(std::move(r));
  }
  for (EvaluatorProfile& e : DecodeLines<EvaluatorProfile>(
           evaluator_log_.ReadLines(), EvaluatorFromJson, evaluator_log_.path())) {
    evaluators_[e.evaluator_id] = std::move(e);
  }
  spdlog::info("store {}: {} expert, {} public matches, {} MOS, {} evaluators", dir_.string(),
               expert_.size(), public_.size(), mos_.size(), evaluators_.size());
}

AppendLog& Store::MatchLog(Mode mode) {
  return mode == Mode::kExpert ? expert_log_ : public_log_;
}

void Store::AppendMatch(const MatchRecord& match) {
  std::lock_guard lock(mu_);
  if (match_ids_.count(match.match_id)) {
    throw Error(ErrorCode::kConflict, "match " + match.match_id + " already recorded");
  }
  MatchLog(match.mode).Append(ToJson(match).dump());
  match_ids_.insert(match.match_id);
  (match.mode == Mode::kExpert ? expert_ : public_).push_back(match);
}

void Store::AppendMos(const MosRecord& record) {
  std::lock_guard lock(mu_);
  if (mos_keys_.count(MosKey(record))) {
    throw Error(ErrorCode::kConflict, "evaluator " + record.evaluator_id +
                                          " already scored image " + record.image_id);
  }
  mos_log_.Append(ToJson(record).dump());
  mos_keys_.insert(MosKey(record));
  mos_.push_back(record);
}

void Store::AppendEvaluator(const EvaluatorProfile& profile) {
  std::lock_guard lock(mu_);
  evaluator_log_.Append(RegistrationJson(profile).dump());
  evaluators_[profile.evaluator_id] = profile;
}

bool Store::HasMatch(const std::string& match_id) const {
  std::lock_guard lock(mu_);
  return match_ids_.count(match_id) > 0;
}

std::vector<MatchRecord> Store::Matches(std::optional<Mode> mode) const {
  std::lock_guard lock(mu_);
  if (mode == Mode::kExpert) return expert_;
  if (mode == Mode::kPublic) return public_;
  std::vector<MatchRecord> all = expert_;
  all.insert(all.end(), public_.begin(), public_.end());
  return all;
}

std::vector<MosRecord> Store::Mos() const {
  std::lock_guard lock(mu_);
  return mos_;
}

std::map<EvaluatorId, EvaluatorProfile> Store::Evaluators() const {
  std::lock_guard lock(mu_);
  return evaluators_;
}

void Store::Compact() {
  std::lock_guard lock(mu_);
  auto dump = [](const auto& records) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const auto& r : records) lines.push_back(ToJson(r).dump());
    return lines;
  };
  expert_log_.Rewrite(dump(expert_));
  public_log_.Rewrite(dump(public_));
  mos_log_.Rewrite(dump(mos_));
  std::vector<std::string> ev;
  for (const auto& [id, e] : evaluators_) ev.push_back(RegistrationJson(e).dump());
  evaluator_log_.Rewrite(ev);
}

}  // namespace arena
