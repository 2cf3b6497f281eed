// Copyright 2026 The TaskForge Authors
// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "taskforge/platform.hpp"
#include "taskforge/sched/ready_queue.hpp"
#include "taskforge/sync/delegation_ticket_lock.hpp"
#include "taskforge/sync/partitioned_ticket_lock.hpp"
#include "taskforge/sync/spsc_queue.hpp"

namespace taskforge::sched {

//! How the ready queue is protected.
enum class SyncMode {
	dtlock, //!< SPSC add buffers + delegation ticket lock
	ptlock, //!< one partitioned ticket lock around the policy
	mutex,  //!< one std::mutex around the policy
};

inline SyncMode parse_sync_mode(std::string_view name)
{
	if (name == "dtlock")
		return SyncMode::dtlock;
	if (name == "ptlock")
		return SyncMode::ptlock;
	if (name == "mutex")
		return SyncMode::mutex;
	throw std::invalid_argument("unknown scheduler sync mode: " + std::string(name));
}

inline const char *to_string(SyncMode mode) noexcept
{
	switch (mode) {
		case SyncMode::dtlock:
			return "dtlock";
		case SyncMode::ptlock:
			return "ptlock";
		case SyncMode::mutex:
			return "mutex";
	}
	return "?";
}

struct SchedulerOptions {
	//! Upper bound on distinct threads that call into the scheduler; worker
	//! ids passed to get_ready_task must be below it.
	std::size_t max_threads = 1;
	//! Number of SPSC add buffers (dtlock mode only).
	std::size_t queues = 1;
	//! Capacity of each add buffer.
	std::size_t capacity = 512;
	PolicyKind policy = PolicyKind::fifo;
	//! Owner re-drains the add buffers while waiters remain.
	bool redrain = false;
};

struct SchedulerStats {
	std::uint64_t acquisitions = 0;   //!< get_ready_task calls that owned the lock
	std::uint64_t served = 0;         //!< items handed to waiting threads
	std::uint64_t drained = 0;        //!< items moved from add buffers to the policy
	std::uint64_t overflow_drains = 0; //!< add_ready_task calls that hit a full buffer and drained
};

template <typename T>
class Scheduler {
public:
	virtual ~Scheduler() = default;

	virtual void add_ready_task(T task, std::size_t origin) = 0;
	virtual std::optional<T> get_ready_task(std::size_t worker) = 0;
	virtual SchedulerStats stats() const = 0;
};

//! Centralized scheduler with decoupled insertion and delegated retrieval.
//!
//! Producers push into one of several bounded SPSC buffers, each guarded on the
//! producer side by a partitioned ticket lock. Consumers enter through the
//! delegation lock: the owner moves buffered tasks into the policy, hands one
//! task to each waiting consumer without releasing the lock, takes one for
//! itself and leaves.
template <typename T>
class SyncScheduler final : public Scheduler<T> {
public:
	explicit SyncScheduler(const SchedulerOptions &options)
		: _dtlock(options.max_threads),
		_policy(options.policy),
		_redrain(options.redrain)
	{
		const std::size_t lanes = options.queues == 0 ? 1 : options.queues;
		_lanes.reserve(lanes);
		for (std::size_t i = 0; i < lanes; ++i)
			_lanes.push_back(std::make_unique<Lane>(options.max_threads, options.capacity));
	}

	void add_ready_task(T task, std::size_t origin) override
	{
		Lane &lane = *_lanes[origin % _lanes.size()];
		SpinWait spin;
		while (true) {
			lane.lock.lock();
			const bool pushed = lane.queue.push(std::move(task));
			lane.lock.unlock();
			if (pushed)
				return;

			// Buffer full: drain it ourselves if nobody is inside.
			if (_dtlock.try_lock()) {
				enter_owner();
				_overflow_drains.fetch_add(1, std::memory_order_relaxed);
				process_ready_tasks();
				policy().push(std::move(task));
				leave_owner();
				_dtlock.unlock();
				return;
			}
			spin.wait();
		}
	}

	std::optional<T> get_ready_task(std::size_t worker) override
	{
		if (std::optional<T> delegated = _dtlock.lock_or_delegate(worker))
			return delegated;

		enter_owner();
		_acquisitions.fetch_add(1, std::memory_order_relaxed);
		process_ready_tasks();
		serve_waiters();
		if (_redrain) {
			while (!_dtlock.empty() && process_ready_tasks() > 0)
				serve_waiters();
		}
		std::optional<T> own = policy().pop();
		leave_owner();
		_dtlock.unlock();
		return own;
	}

	//! Owner only: moves every buffered task into the policy, lane by lane in
	//! FIFO order. Returns the number moved.
	std::size_t process_ready_tasks()
	{
		std::size_t moved = 0;
		for (auto &lane : _lanes) {
			while (std::optional<T> item = lane->queue.pop()) {
				policy().push(std::move(*item));
				++moved;
			}
		}
		_drained.fetch_add(moved, std::memory_order_relaxed);
		return moved;
	}

	//! Acquires the consumer lock and drains the add buffers. For tests and
	//! maintenance; workers use get_ready_task.
	std::size_t drain_pending()
	{
		_dtlock.lock();
		enter_owner();
		const std::size_t moved = process_ready_tasks();
		leave_owner();
		_dtlock.unlock();
		return moved;
	}

	SchedulerStats stats() const override
	{
		SchedulerStats s;
		s.acquisitions = _acquisitions.load(std::memory_order_relaxed);
		s.served = _served.load(std::memory_order_relaxed);
		s.drained = _drained.load(std::memory_order_relaxed);
		s.overflow_drains = _overflow_drains.load(std::memory_order_relaxed);
		return s;
	}

	std::size_t queue_count() const noexcept { return _lanes.size(); }

private:
	struct Lane {
		Lane(std::size_t max_threads, std::size_t capacity) : lock(max_threads), queue(capacity) {}

		sync::PartitionedTicketLock lock;
		sync::SpscQueue<T> queue;
	};

	void serve_waiters()
	{
		while (!_dtlock.empty() && !policy().empty()) {
			const std::size_t id = _dtlock.front();
			_dtlock.set_item(id, std::move(*policy().pop()));
			_dtlock.pop_front();
			_served.fetch_add(1, std::memory_order_relaxed);
		}
	}

	ReadyQueue<T> &policy() noexcept
	{
#if TASKFORGE_DEBUG_CHECKS
		TASKFORGE_CHECK(_policy_owner.load(std::memory_order_relaxed) == std::this_thread::get_id(),
			"scheduling policy touched without owning the scheduler lock");
#endif
		return _policy;
	}

	void enter_owner() noexcept
	{
#if TASKFORGE_DEBUG_CHECKS
		_policy_owner.store(std::this_thread::get_id(), std::memory_order_relaxed);
#endif
	}

	void leave_owner() noexcept
	{
#if TASKFORGE_DEBUG_CHECKS
		_policy_owner.store(std::thread::id(), std::memory_order_relaxed);
#endif
	}

	sync::DelegationTicketLock<T> _dtlock;
	std::vector<std::unique_ptr<Lane>> _lanes;
	ReadyQueue<T> _policy;
	bool _redrain;
	std::atomic<std::uint64_t> _acquisitions{0};
	std::atomic<std::uint64_t> _served{0};
	std::atomic<std::uint64_t> _drained{0};
	std::atomic<std::uint64_t> _overflow_drains{0};
#if TASKFORGE_DEBUG_CHECKS
	std::atomic<std::thread::id> _policy_owner{};
#endif
};

//! Policy behind a single lock for both insertion and retrieval.
template <typename T, typename Lock>
class LockedScheduler final : public Scheduler<T> {
public:
	explicit LockedScheduler(const SchedulerOptions &options)
		: _lock(make_lock(options)), _policy(options.policy)
	{
	}

	void add_ready_task(T task, std::size_t) override
	{
		std::lock_guard<Lock> guard(*_lock);
		_policy.push(std::move(task));
	}

	std::optional<T> get_ready_task(std::size_t) override
	{
		std::lock_guard<Lock> guard(*_lock);
		_acquisitions.fetch_add(1, std::memory_order_relaxed);
		return _policy.pop();
	}

	SchedulerStats stats() const override
	{
		SchedulerStats s;
		s.acquisitions = _acquisitions.load(std::memory_order_relaxed);
		return s;
	}

private:
	static std::unique_ptr<Lock> make_lock(const SchedulerOptions &options)
	{
		if constexpr (std::is_constructible_v<Lock, std::size_t>)
			return std::make_unique<Lock>(options.max_threads);
		else
			return std::make_unique<Lock>();
	}

	std::unique_ptr<Lock> _lock;
	ReadyQueue<T> _policy;
	std::atomic<std::uint64_t> _acquisitions{0};
};

template <typename T>
std::unique_ptr<Scheduler<T>> make_scheduler(SyncMode mode, const SchedulerOptions &options)
{
	switch (mode) {
		case SyncMode::dtlock:
			return std::make_unique<SyncScheduler<T>>(options);
		case SyncMode::ptlock:
			return std::make_unique<LockedScheduler<T, sync::PartitionedTicketLock>>(options);
		case SyncMode::mutex:
			return std::make_unique<LockedScheduler<T, std::mutex>>(options);
	}
	throw std::invalid_argument("unknown scheduler sync mode");
}

} // namespace taskforge::sched
