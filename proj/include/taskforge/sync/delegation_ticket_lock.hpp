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
#include <limits>
#include <memory>
#include <optional>
#include <utility>

#include "taskforge/platform.hpp"
#include "taskforge/sync/partitioned_ticket_lock.hpp"

namespace taskforge::sync {

//! Partitioned ticket lock whose owner can serve waiting threads.
//!
//! Waiters register themselves in a log array (one store of ticket + id) and
//! then spin as in the base lock. While inside the critical section the owner
//! may inspect the longest waiter (empty/front), hand it a result (set_item),
//! and release only that waiter (pop_front), keeping the lock for itself. A
//! waiter released without a result becomes the owner.
template <typename T>
class DelegationTicketLock : public PartitionedTicketLock {
public:
	//! \param max_threads upper bound on concurrent callers; ids passed to
	//! lock_or_delegate must be below the rounded-up size().
	explicit DelegationTicketLock(std::size_t max_threads)
		: PartitionedTicketLock(max_threads),
		_logq(std::make_unique<Padded<std::atomic<std::uint64_t>>[]>(_size)),
		_readyq(std::make_unique<ReadySlot[]>(_size))
#if TASKFORGE_DEBUG_CHECKS
		, _ids_in_use(std::make_unique<std::atomic<bool>[]>(_size))
#endif
	{
		for (std::size_t i = 0; i < _size; ++i)
			_logq[i].value.store(0, std::memory_order_relaxed);
	}

	//! Either acquires the lock (returns nullopt) or receives an item handed
	//! over by the owner without ever owning the lock.
	std::optional<T> lock_or_delegate(std::size_t id)
	{
		TASKFORGE_DEBUG_ASSERT(id < _size, "delegation id out of range");
#if TASKFORGE_DEBUG_CHECKS
		TASKFORGE_CHECK(!_ids_in_use[id].exchange(true, std::memory_order_relaxed),
			"duplicate live delegation id");
#endif
		const std::uint64_t ticket = get_ticket();
#if TASKFORGE_DEBUG_CHECKS
		const std::uint64_t previous =
			_logq[ticket & _mask].value.exchange(ticket + id, std::memory_order_release);
		TASKFORGE_CHECK(previous < ticket || previous == 0, "logq slot overrun");
#else
		_logq[ticket & _mask].value.store(ticket + id, std::memory_order_release);
#endif
		wait_turn(ticket);

		ReadySlot &slot = _readyq[id];
		std::optional<T> result;
		if (slot.ticket.load(std::memory_order_acquire) == ticket) {
			result.emplace(std::move(slot.item));
		} else {
			note_owner(ticket);
		}
#if TASKFORGE_DEBUG_CHECKS
		_ids_in_use[id].store(false, std::memory_order_relaxed);
#endif
		return result;
	}

	//! Owner only. True when no waiter has registered for the next turn yet;
	//! may miss a waiter that is mid-registration, which then simply acquires.
	bool empty() const noexcept
	{
		check_owner();
		const std::uint64_t tail = tail_relaxed();
		return _logq[tail & _mask].value.load(std::memory_order_acquire) < tail;
	}

	//! Owner only, after empty() returned false: id of the longest waiter.
	std::size_t front() const noexcept
	{
		check_owner();
		const std::uint64_t tail = tail_relaxed();
		const std::uint64_t logged = _logq[tail & _mask].value.load(std::memory_order_acquire);
		TASKFORGE_DEBUG_ASSERT(logged >= tail, "front() on an empty delegation queue");
		return static_cast<std::size_t>(logged - tail);
	}

	//! Owner only. Publishes item for the waiter `id`; it is observed once that
	//! waiter is released by pop_front().
	void set_item(std::size_t id, T item)
	{
		check_owner();
		ReadySlot &slot = _readyq[id];
		slot.item = std::move(item);
		slot.ticket.store(tail_relaxed(), std::memory_order_release);
	}

	//! Owner only. Releases the front waiter. If set_item() preceded, the
	//! caller keeps the lock; otherwise ownership passes to that waiter.
	void pop_front() noexcept
	{
		check_owner();
		release_next();
	}

private:
	static constexpr std::uint64_t no_ticket = std::numeric_limits<std::uint64_t>::max();

	struct alignas(cache_line_size) ReadySlot {
		std::atomic<std::uint64_t> ticket{no_ticket};
		T item{};
	};

	std::unique_ptr<Padded<std::atomic<std::uint64_t>>[]> _logq;
	std::unique_ptr<ReadySlot[]> _readyq;
#if TASKFORGE_DEBUG_CHECKS
	std::unique_ptr<std::atomic<bool>[]> _ids_in_use;
#endif
};

} // namespace taskforge::sync
