// Copyright 2026 The qwb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qwb/session.hpp"

namespace qwb {

/// A session plus the lock that serializes its mutations.
struct SessionSlot {
    explicit SessionSlot(Session s) : session(std::move(s)) {}
    std::mutex mutex;
    Session session;
};

/// Worker pool for steps. Validation happens in submit() under the session
/// lock; kernels run unlocked on a snapshot; the artifact is committed under
/// the lock again, so readers only ever see complete artifacts.
class JobManager {
  public:
    /// `workers == 0` uses the hardware concurrency.
    explicit JobManager(unsigned workers = 0);
    ~JobManager();
    JobManager(const JobManager &) = delete;
    JobManager &operator=(const JobManager &) = delete;

    /// Throws on validation errors; nothing is enqueued then.
    std::string submit(const std::shared_ptr<SessionSlot> &slot, const StepRequest &request,
                       std::uint64_t default_seed = 0);
    /// Throws NotFound.
    JobRecord get(std::string_view id) const;
    /// Blocks until the job reaches a terminal state.
    JobRecord wait(std::string_view id) const;

  private:
    struct Entry {
        JobRecord record;
        std::shared_ptr<SessionSlot> slot;
        PlannedStep step;
    };

    void work();
    void finish(const std::string &id, JobRecord record);

    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::deque<std::string> queue_;
    std::map<std::string, Entry, std::less<>> jobs_;
    std::vector<std::thread> workers_;
    bool stopping_ = false;
};

}  // namespace qwb
