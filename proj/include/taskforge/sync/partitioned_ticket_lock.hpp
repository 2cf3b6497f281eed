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
#include <thread>

#include "taskforge/platform.hpp"

namespace taskforge::sync {

//! FIFO spin lock where each ticket busy-waits on its own padded slot of a
//! circular waiting array.
//!
//! The array represents an unbounded virtual waiting queue: ticket t waits on
//! slot t mod Size until the slot holds a value >= t. A slot is written only by
//! the releasing owner, so with at most Size threads holding or waiting no slot
//! is overwritten while still awaited; each slot's value grows by exactly Size
//! per wrap.
class PartitionedTicketLock {
public:
	//! \param max_threads upper bound on threads holding or waiting at once;
	//! rounded up to a power of two.
	explicit PartitionedTicketLock(std::size_t max_threads)
		: _size(next_pow2(max_threads == 0 ? 1 : max_threads)),
		_mask(_size - 1),
		_waitq(std::make_unique<Padded<std::atomic<std::uint64_t>>[]>(_size))
	{
		_head.value.store(0, std::memory_order_relaxed);
		_tail.value.store(1, std::memory_order_relaxed);
		for (std::size_t i = 0; i < _size; ++i)
			_waitq[i].value.store(0, std::memory_order_relaxed);
	}

	PartitionedTicketLock(const PartitionedTicketLock &) = delete;
	PartitionedTicketLock &operator=(const PartitionedTicketLock &) = delete;

	//! Returns the ticket that acquired the lock.
	std::uint64_t lock() noexcept
	{
		const std::uint64_t ticket = get_ticket();
		wait_turn(ticket);
		note_owner(ticket);
		return ticket;
	}

	//! Acquires only if the lock is free. A failed attempt takes no ticket.
	bool try_lock() noexcept
	{
		const std::uint64_t head = _head.value.load(std::memory_order_acquire);
		if (_tail.value.load(std::memory_order_acquire) != head + 1)
			return false;
		// The previous owner publishes the slot after bumping the tail.
		if (_waitq[head & _mask].value.load(std::memory_order_acquire) < head)
			return false;
		std::uint64_t expected = head;
		if (!_head.value.compare_exchange_strong(expected, head + 1, std::memory_order_seq_cst,
				std::memory_order_relaxed))
			return false;
		note_owner(head);
		return true;
	}

	void unlock() noexcept
	{
		check_owner();
#if TASKFORGE_DEBUG_CHECKS
		_owner.store(std::thread::id(), std::memory_order_relaxed);
#endif
		release_next();
	}

	std::size_t size() const noexcept { return _size; }

	// Observers for tests and diagnostics. Racy unless the lock is quiescent.
	std::uint64_t head() const noexcept { return _head.value.load(std::memory_order_acquire); }
	std::uint64_t tail() const noexcept { return _tail.value.load(std::memory_order_acquire); }
	std::uint64_t waitq_value(std::size_t slot) const noexcept
	{
		return _waitq[slot & _mask].value.load(std::memory_order_acquire);
	}

protected:
	std::uint64_t get_ticket() noexcept
	{
		return _head.value.fetch_add(1, std::memory_order_seq_cst);
	}

	void wait_turn(std::uint64_t ticket) const noexcept
	{
		const auto &slot = _waitq[ticket & _mask].value;
		SpinWait spin;
		while (slot.load(std::memory_order_acquire) < ticket)
			spin.wait();
	}

	//! Hands the lock to the ticket equal to the current tail.
	void release_next() noexcept
	{
		const std::uint64_t tail = _tail.value.load(std::memory_order_relaxed);
		_tail.value.store(tail + 1, std::memory_order_release);
#if TASKFORGE_DEBUG_CHECKS
		const std::uint64_t previous =
			_waitq[tail & _mask].value.exchange(tail, std::memory_order_release);
		TASKFORGE_CHECK(previous == (tail >= _size ? tail - _size : 0),
			"waitq slot overrun: generation tag mismatch");
#else
		_waitq[tail & _mask].value.store(tail, std::memory_order_release);
#endif
	}

	std::uint64_t tail_relaxed() const noexcept
	{
		return _tail.value.load(std::memory_order_relaxed);
	}

	void note_owner([[maybe_unused]] std::uint64_t ticket) noexcept
	{
#if TASKFORGE_DEBUG_CHECKS
		TASKFORGE_CHECK(_tail.value.load(std::memory_order_relaxed) == ticket + 1,
			"acquired out of ticket order");
		_owner_ticket.store(ticket, std::memory_order_relaxed);
		_owner.store(std::this_thread::get_id(), std::memory_order_relaxed);
#endif
	}

	void check_owner() const noexcept
	{
#if TASKFORGE_DEBUG_CHECKS
		TASKFORGE_CHECK(_owner.load(std::memory_order_relaxed) == std::this_thread::get_id(),
			"lock operation by a thread that does not own the lock");
#endif
	}

	std::size_t _size;
	std::uint64_t _mask;

private:
	Padded<std::atomic<std::uint64_t>> _head;
	Padded<std::atomic<std::uint64_t>> _tail;
	std::unique_ptr<Padded<std::atomic<std::uint64_t>>[]> _waitq;
#if TASKFORGE_DEBUG_CHECKS
	std::atomic<std::uint64_t> _owner_ticket{0};
	std::atomic<std::thread::id> _owner{};
#endif
};

} // namespace taskforge::sync
