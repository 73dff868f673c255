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

#include "qwb/jobs.hpp"

#include <algorithm>

#include "qwb/error.hpp"

namespace qwb {

JobManager::JobManager(unsigned workers) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    for (unsigned i = 0; i < workers; ++i) workers_.emplace_back([this] { work(); });
}

JobManager::~JobManager() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    changed_.notify_all();
    for (auto &t : workers_) t.join();
}

std::string JobManager::submit(const std::shared_ptr<SessionSlot> &slot, const StepRequest &request,
                               std::uint64_t default_seed) {
    Entry entry;
    entry.slot = slot;
    std::lock_guard session_lock(slot->mutex);
    entry.step = plan_step(slot->session, request, default_seed);
    entry.record.session = slot->session.id();
    entry.record.kind = std::string(to_string(request.kind));
    entry.record.parameters = entry.step.parameters;
    std::lock_guard lock(mutex_);
    // Session-scoped ids; a reloaded session may reuse one already seen.
    do {
        entry.record.id = slot->session.next_job_id();
    } while (jobs_.contains(entry.record.id));
    slot->session.record_job(entry.record);
    const auto id = entry.record.id;
    jobs_.emplace(id, std::move(entry));
    queue_.push_back(id);
    changed_.notify_all();
    return id;
}

JobRecord JobManager::get(std::string_view id) const {
    std::lock_guard lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::NotFound, "unknown job '" + std::string(id) + "'", std::string(id));
    return it->second.record;
}

JobRecord JobManager::wait(std::string_view id) const {
    std::unique_lock lock(mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::NotFound, "unknown job '" + std::string(id) + "'", std::string(id));
    changed_.wait(lock, [&] {
        const auto s = it->second.record.status;
        return s == JobStatus::Done || s == JobStatus::Failed;
    });
    return it->second.record;
}

void JobManager::finish(const std::string &id, JobRecord record) {
    std::lock_guard lock(mutex_);
    auto &entry = jobs_.at(id);
    entry.record = std::move(record);
    entry.step = {};
    changed_.notify_all();
}

void JobManager::work() {
    for (;;) {
        std::string id;
        PlannedStep step;
        std::shared_ptr<SessionSlot> slot;
        JobRecord record;
        {
            std::unique_lock lock(mutex_);
            changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_ && queue_.empty()) return;
            id = queue_.front();
            queue_.pop_front();
            auto &entry = jobs_.at(id);
            entry.record.status = JobStatus::Running;
            step = entry.step;
            slot = entry.slot;
            record = entry.record;
        }
        {
            std::lock_guard session_lock(slot->mutex);
            slot->session.record_job(record);
        }
        try {
            auto out = execute_step(step);
            std::lock_guard session_lock(slot->mutex);
            record.artifact = slot->session.commit(out.kind, provenance_for(step), std::move(out.payload));
            record.status = JobStatus::Done;
            slot->session.record_job(record);
        } catch (const std::exception &e) {
            record.status = JobStatus::Failed;
            record.error = e.what();
            std::lock_guard session_lock(slot->mutex);
            slot->session.record_job(record);
        }
        finish(id, std::move(record));
    }
}

}  // namespace qwb
