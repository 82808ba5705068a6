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

// Append-only persistent store.
//
// Each partition is a JSON Lines file in the data directory:
//
//   matches_expert.jsonl   match votes cast in expert mode
//   matches_public.jsonl   match votes cast in public mode
//   mos.jsonl              MOS score sheets
//   evaluators.jsonl       evaluator registrations and status changes
//
// Every append is flushed and fsync'ed before it returns, so an
// acknowledged record survives a crash. Loading tolerates a torn final line
// and drops duplicate ids (first occurrence wins; for evaluators the last
// event wins). Compact() rewrites each file deduplicated via an atomic
// rename.

#ifndef ARENA_STORE_H_
#define ARENA_STORE_H_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "arena/types.h"

namespace arena {

class AppendLog {
 public:
  explicit AppendLog(std::filesystem::path path);
  ~AppendLog();
  AppendLog(const AppendLog&) = delete;
  AppendLog& operator=(const AppendLog&) = delete;

  // Writes `line` plus a newline and fsyncs. Throws kIo.
  void Append(const std::string& line);
  // Complete lines currently in the file. A trailing fragment without a
  // newline (torn write) is dropped and truncated away.
  std::vector<std::string> ReadLines();
  // Atomically replaces the file content with `lines`.
  void Rewrite(const std::vector<std::string>& lines);
  const std::filesystem::path& path() const { return path_; }

 private:
  void Open();

  std::filesystem::path path_;
  int fd_ = -1;
};

class Store {
 public:
  // Creates the directory when missing and loads existing partitions.
  // Throws kIo or kSchema (with file and line) on unreadable content.
  explicit Store(std::filesystem::path data_dir);

  // Throws kConflict when the match id is already stored.
  void AppendMatch(const MatchRecord& match);
  // Throws kConflict when the evaluator already scored the image.
  void AppendMos(const MosRecord& record);
  // Records registration fields (mode, persona, qualified, flagged).
  void AppendEvaluator(const EvaluatorProfile& profile);

  bool HasMatch(const std::string& match_id) const;
  // Snapshot copies in append order. `mode` selects a partition.
  std::vector<MatchRecord> Matches(std::optional<Mode> mode = std::nullopt) const;
  std::vector<MosRecord> Mos() const;
  // Latest registration event per evaluator, by id.
  std::map<EvaluatorId, EvaluatorProfile> Evaluators() const;

  void Compact();
  const std::filesystem::path& data_dir() const { return dir_; }

 private:
  AppendLog& MatchLog(Mode mode);

  std::filesystem::path dir_;
  mutable std::mutex mu_;
  AppendLog expert_log_;
  AppendLog public_log_;
  AppendLog mos_log_;
  AppendLog evaluator_log_;
  std::vector<MatchRecord> expert_;
  std::vector<MatchRecord> public_;
  std::set<std::string> match_ids_;
  std::vector<MosRecord> mos_;
  std::set<std::string> mos_keys_;  // evaluator and image
  std::map<EvaluatorId, EvaluatorProfile> evaluators_;
};

}  // namespace arena

#endif  // ARENA_STORE_H_
