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

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "taskforge/deps/access_flags.hpp"
#include "taskforge/deps/data_access.hpp"
#include "taskforge/platform.hpp"
#include "taskforge/task.hpp"

namespace taskforge::deps {

//! Messages generated by a single delivery. At most one per transition rule
//! plus the delivery notification.
class OutboundMessages {
public:
	static constexpr std::size_t capacity = 6;

	void push(const DataAccessMessage &message) noexcept
	{
		TASKFORGE_DEBUG_ASSERT(_size < capacity, "too many outbound messages");
		_messages[_size++] = message;
	}

	std::size_t size() const noexcept { return _size; }
	bool empty() const noexcept { return _size == 0; }
	const DataAccessMessage &operator[](std::size_t i) const noexcept { return _messages[i]; }
	const DataAccessMessage *begin() const noexcept { return _messages.data(); }
	const DataAccessMessage *end() const noexcept { return _messages.data() + _size; }

private:
	std::array<DataAccessMessage, capacity> _messages{};
	std::size_t _size = 0;
};

//! Plain copy of the audit counters.
struct DependencyAuditSnapshot {
	std::uint64_t deliveries = 0;
	std::uint64_t messages_generated = 0;
	std::uint64_t empty_message_violations = 0;
	std::uint64_t overlap_violations = 0;
	std::uint64_t delivery_bound_violations = 0;
	std::uint64_t retry_bound_violations = 0;
	std::uint64_t max_deliveries_per_access = 0;
	std::uint64_t max_retries = 0;
	std::uint64_t readiness_transitions = 0;
	std::uint64_t accesses_registered = 0;
	std::uint64_t accesses_retired = 0;
	std::uint64_t parent_notifications = 0;

	bool clean() const noexcept
	{
		return empty_message_violations == 0 && overlap_violations == 0
			&& delivery_bound_violations == 0 && retry_bound_violations == 0;
	}
};

struct EngineOptions {
	//! Record per-delivery legality and per-access delivery counts.
	bool auditing = false;
	//! Use a compare-and-exchange loop instead of fetch-or for deliveries.
	bool cas_loop = false;
};

struct EngineHooks {
	//! Called once when a task's last unsatisfied access becomes satisfied.
	std::function<void(Task &)> on_ready;
	//! Called once when nothing references a task anymore.
	std::function<void(Task &)> dispose;
};

//! Wait-free dependency engine built on per-access atomic state machines.
//!
//! Every state change of an access is a fetch-or of a non-empty set of flags
//! the access did not have yet. Outbound messages are derived from the
//! conditions that hold after the fetch-or but did not hold before, so each
//! rule fires exactly once per access:
//!
//!   satisfied   (READ and READ_SAT) or WRITE_SAT: one readiness decrement
//!   R1  READ access, READ_SAT + SUCCESSOR_LINKED: READ_SAT to the successor
//!   R2  WRITE_SAT + COMPLETED + CHILD_COMPLETED + SUCCESSOR_LINKED:
//!       WRITE_SAT (plus READ_SAT unless R1 covers it) to the successor,
//!       acknowledged with ACK_SUCCESSOR
//!   R3a READ_SAT + CHILD_LINKED: READ_SAT to the first child access
//!   R3b WRITE_SAT + CHILD_LINKED: WRITE_SAT to the first child access,
//!       acknowledged with ACK_CHILD
//!   R4  WRITE_SAT + COMPLETED + CHILD_COMPLETED + PARENT_SEALED on the tail
//!       of a child chain: CHILD_COMPLETED to the parent access, acknowledged
//!       with ACK_PARENT
//!
//! An access whose flags reach the terminal predicate will never receive
//! another message; the delivery that makes it terminal drops the access's
//! reference on its task.
class DependencyEngine {
public:
	DependencyEngine(EngineOptions options, EngineHooks hooks)
		: _options(options), _hooks(std::move(hooks))
	{
	}

	DependencyEngine(const DependencyEngine &) = delete;
	DependencyEngine &operator=(const DependencyEngine &) = delete;

	const EngineOptions &options() const noexcept { return _options; }

	static bool is_satisfied(AccessType type, AccessFlags flags) noexcept
	{
		return (type == AccessType::read && flags.has(AccessFlags::read_satisfied))
			|| flags.has(AccessFlags::write_satisfied);
	}

	static bool is_terminal(AccessFlags flags, bool has_parent) noexcept
	{
		constexpr AccessFlags base = AccessFlags::read_satisfied | AccessFlags::write_satisfied
			| AccessFlags::completed | AccessFlags::child_completed;
		if (!flags.has(base))
			return false;
		if (flags.has(AccessFlags::successor_linked)) {
			if (!flags.has(AccessFlags::ack_successor))
				return false;
		} else if (!flags.has(AccessFlags::parent_sealed)) {
			// Tail of a domain that can still grow.
			return false;
		}
		if (flags.has(AccessFlags::child_linked) && !flags.has(AccessFlags::ack_child))
			return false;
		if (flags.has(AccessFlags::parent_sealed) && has_parent
			&& !flags.has(AccessFlags::ack_parent))
			return false;
		return true;
	}

	static bool is_terminal(const DataAccess &access) noexcept
	{
		return is_terminal(access.load_flags(), access.parent != nullptr);
	}

	//! Folds repeated addresses into one declaration; a read and a write to
	//! the same address become a readwrite. Keeps first-appearance order.
	static std::vector<AccessDecl> merge_declarations(std::span<const AccessDecl> decls)
	{
		std::vector<AccessDecl> merged;
		merged.reserve(decls.size());
		std::unordered_map<std::uint64_t, std::size_t> index;
		for (const AccessDecl &decl : decls) {
			auto [it, inserted] = index.try_emplace(decl.address, merged.size());
			if (inserted) {
				merged.push_back(decl);
			} else if (merged[it->second].type != decl.type) {
				merged[it->second].type = AccessType::readwrite;
			}
		}
		return merged;
	}

	//! Creates the task's accesses inside `domain` and links them after the
	//! latest access to the same address. Must run on the domain owner's
	//! thread. The task is handed to on_ready once all accesses are satisfied.
	void register_task_accesses(Task &task, std::span<const AccessDecl> decls,
		DependencyDomain &domain, MailBox &mailbox)
	{
		TASKFORGE_DEBUG_ASSERT(!domain.sealed.load(std::memory_order_relaxed),
			"registration into a sealed domain");
		std::vector<AccessDecl> merged;
		if (decls.size() > 1) {
			merged = merge_declarations(decls);
			decls = merged;
		}

		const auto count = static_cast<std::int32_t>(decls.size());
		task.accesses.resize(decls.size());
		task.parent = domain.owner;
		task.readiness.store(count + 1, std::memory_order_relaxed);
		task.refs.fetch_add(count, std::memory_order_relaxed);
		if (domain.owner != nullptr)
			domain.owner->refs.fetch_add(1, std::memory_order_relaxed);
		if (_options.auditing)
			_audit.accesses_registered.fetch_add(decls.size(), std::memory_order_relaxed);

		for (std::size_t i = 0; i < decls.size(); ++i) {
			DataAccess &access = task.accesses[i];
			access.address = decls[i].address;
			access.type = decls[i].type;
			access.owner = &task;

			auto covering = domain.owner_accesses.find(access.address);
			if (covering != domain.owner_accesses.end())
				access.parent = covering->second;

			auto [slot, inserted] = domain.bottom_map.try_emplace(access.address, &access);
			if (inserted) {
				if (access.parent != nullptr) {
					access.parent->child.store(&access, std::memory_order_relaxed);
					mailbox.push({AccessFlags::child_linked, {}, nullptr, access.parent});
				} else {
					mailbox.push({AccessFlags::read_satisfied | AccessFlags::write_satisfied, {},
						nullptr, &access});
				}
			} else {
				DataAccess *predecessor = slot->second;
				predecessor->successor.store(&access, std::memory_order_relaxed);
				mailbox.push({AccessFlags::successor_linked, {}, nullptr, predecessor});
				slot->second = &access;
			}
		}

		process_mailbox(mailbox);
		decrement_readiness(task);
	}

	//! Applies one message and returns the messages it generates.
	OutboundMessages deliver(const DataAccessMessage &message)
	{
		DataAccess &access = *message.to;
		const AccessFlags incoming = message.flags_for_next;
		const AccessType type = access.type;
		DataAccess *const parent = access.parent;
		Task *const owner = access.owner;

		AccessFlags before;
		if (_options.cas_loop) {
			AccessFlags::bits_type expected = access.flags.load(std::memory_order_relaxed);
			std::uint64_t retries = 0;
			while (!access.flags.compare_exchange_strong(expected,
				static_cast<AccessFlags::bits_type>(expected | incoming.bits()),
				std::memory_order_acq_rel, std::memory_order_relaxed)) {
				++retries;
			}
			before = AccessFlags(expected);
			if (_options.auditing)
				record_retries(retries);
		} else {
			before = AccessFlags(access.flags.fetch_or(incoming.bits(), std::memory_order_acq_rel));
		}
		const AccessFlags after = before | incoming;

		TASKFORGE_DEBUG_ASSERT(!incoming.empty(), "empty message");
		TASKFORGE_DEBUG_ASSERT(!before.intersects(incoming), "message repeats a flag");
		if (_options.auditing)
			record_delivery(access, before, incoming);

		auto newly = [&](AccessFlags condition) {
			return after.has(condition) && !before.has(condition);
		};

		OutboundMessages out;
		const bool is_read = type == AccessType::read;

		if (newly(AccessFlags::successor_linked | AccessFlags::read_satisfied) && is_read) {
			out.push({AccessFlags::read_satisfied, {}, &access,
				access.successor.load(std::memory_order_relaxed)});
		}
		if (newly(AccessFlags::write_satisfied | AccessFlags::completed
				| AccessFlags::child_completed | AccessFlags::successor_linked)) {
			// A read access already forwards READ_SAT through R1.
			const AccessFlags forward = is_read
				? AccessFlags(AccessFlags::write_satisfied)
				: AccessFlags::read_satisfied | AccessFlags::write_satisfied;
			out.push({forward, AccessFlags::ack_successor, &access,
				access.successor.load(std::memory_order_relaxed)});
		}
		if (newly(AccessFlags::read_satisfied | AccessFlags::child_linked)) {
			out.push({AccessFlags::read_satisfied, {}, &access,
				access.child.load(std::memory_order_relaxed)});
		}
		if (newly(AccessFlags::write_satisfied | AccessFlags::child_linked)) {
			out.push({AccessFlags::write_satisfied, AccessFlags::ack_child, &access,
				access.child.load(std::memory_order_relaxed)});
		}
		if (parent != nullptr && !after.has(AccessFlags::successor_linked)
			&& newly(AccessFlags::write_satisfied | AccessFlags::completed
				| AccessFlags::child_completed | AccessFlags::parent_sealed)) {
			out.push({AccessFlags::child_completed, AccessFlags::ack_parent, &access, parent});
			if (_options.auditing)
				_audit.parent_notifications.fetch_add(1, std::memory_order_relaxed);
		}
		if (!message.flags_after_propagation.empty()) {
			out.push({message.flags_after_propagation, {}, nullptr, message.from});
		}

		if (_options.auditing)
			_audit.messages_generated.fetch_add(out.size(), std::memory_order_relaxed);

		if (!is_satisfied(type, before) && is_satisfied(type, after))
			decrement_readiness(*owner);

		// Last use of the access: once terminal no message can reach it again.
		if (!is_terminal(before, parent != nullptr) && is_terminal(after, parent != nullptr)) {
			if (_options.auditing)
				_audit.accesses_retired.fetch_add(1, std::memory_order_relaxed);
			release(*owner);
		}
		return out;
	}

	//! Delivers messages until the mailbox is empty. Returns the number of
	//! deliveries performed.
	std::size_t process_mailbox(MailBox &mailbox)
	{
		std::size_t delivered = 0;
		while (!mailbox.empty()) {
			const DataAccessMessage message = mailbox.pop();
			for (const DataAccessMessage &generated : deliver(message))
				mailbox.push(generated);
			++delivered;
		}
		return delivered;
	}

	//! Releases the accesses of a finished task (whose children have all
	//! finished) and seals its child domain. Returns the number of messages
	//! enqueued directly: one per access plus one per sealed chain tail.
	std::size_t unregister_task_accesses(Task &task, MailBox &mailbox)
	{
		TASKFORGE_CHECK(!task.unregistered, "task unregistered twice");
		task.unregistered = true;

		std::size_t enqueued = 0;
		for (DataAccess &access : task.accesses.span()) {
			const AccessFlags flags = access.load_flags();
			if (flags.has(AccessFlags::child_linked)) {
				mailbox.push({AccessFlags::completed, {}, nullptr, &access});
			} else {
				mailbox.push(
					{AccessFlags::completed | AccessFlags::child_completed, {}, nullptr, &access});
			}
			++enqueued;
		}
		if (task.domain) {
			task.domain->sealed.store(true, std::memory_order_release);
			for (const auto &[address, tail] : task.domain->bottom_map) {
				mailbox.push({AccessFlags::parent_sealed, {}, nullptr, tail});
				++enqueued;
			}
		}
		process_mailbox(mailbox);
		return enqueued;
	}

	//! Drops one reference on `task`; disposal cascades to the parent.
	void release(Task &task)
	{
		Task *current = &task;
		while (current != nullptr) {
			if (current->refs.fetch_sub(1, std::memory_order_acq_rel) != 1)
				return;
			Task *parent = current->parent;
			current->state.store(TaskState::disposed, std::memory_order_relaxed);
			if (_hooks.dispose)
				_hooks.dispose(*current);
			current = parent;
		}
	}

	DependencyAuditSnapshot audit() const noexcept
	{
		DependencyAuditSnapshot s;
		s.deliveries = _audit.deliveries.load(std::memory_order_relaxed);
		s.messages_generated = _audit.messages_generated.load(std::memory_order_relaxed);
		s.empty_message_violations = _audit.empty_messages.load(std::memory_order_relaxed);
		s.overlap_violations = _audit.overlaps.load(std::memory_order_relaxed);
		s.delivery_bound_violations = _audit.delivery_bound.load(std::memory_order_relaxed);
		s.retry_bound_violations = _audit.retry_bound.load(std::memory_order_relaxed);
		s.max_deliveries_per_access = _audit.max_deliveries.load(std::memory_order_relaxed);
		s.max_retries = _audit.max_retries.load(std::memory_order_relaxed);
		s.readiness_transitions = _audit.readiness_transitions.load(std::memory_order_relaxed);
		s.accesses_registered = _audit.accesses_registered.load(std::memory_order_relaxed);
		s.accesses_retired = _audit.accesses_retired.load(std::memory_order_relaxed);
		s.parent_notifications = _audit.parent_notifications.load(std::memory_order_relaxed);
		return s;
	}

private:
	struct AuditCounters {
		std::atomic<std::uint64_t> deliveries{0};
		std::atomic<std::uint64_t> messages_generated{0};
		std::atomic<std::uint64_t> empty_messages{0};
		std::atomic<std::uint64_t> overlaps{0};
		std::atomic<std::uint64_t> delivery_bound{0};
		std::atomic<std::uint64_t> retry_bound{0};
		std::atomic<std::uint64_t> max_deliveries{0};
		std::atomic<std::uint64_t> max_retries{0};
		std::atomic<std::uint64_t> readiness_transitions{0};
		std::atomic<std::uint64_t> accesses_registered{0};
		std::atomic<std::uint64_t> accesses_retired{0};
		std::atomic<std::uint64_t> parent_notifications{0};
	};

	static void store_max(std::atomic<std::uint64_t> &target, std::uint64_t value) noexcept
	{
		std::uint64_t current = target.load(std::memory_order_relaxed);
		while (value > current
			&& !target.compare_exchange_weak(current, value, std::memory_order_relaxed)) {
		}
	}

	void record_delivery(DataAccess &access, AccessFlags before, AccessFlags incoming) noexcept
	{
		_audit.deliveries.fetch_add(1, std::memory_order_relaxed);
		if (incoming.empty())
			_audit.empty_messages.fetch_add(1, std::memory_order_relaxed);
		if (before.intersects(incoming))
			_audit.overlaps.fetch_add(1, std::memory_order_relaxed);
		const unsigned received = access.deliveries.fetch_add(1, std::memory_order_relaxed) + 1u;
		if (received > AccessFlags::universe_size)
			_audit.delivery_bound.fetch_add(1, std::memory_order_relaxed);
		store_max(_audit.max_deliveries, received);
	}

	void record_retries(std::uint64_t retries) noexcept
	{
		if (retries > AccessFlags::universe_size)
			_audit.retry_bound.fetch_add(1, std::memory_order_relaxed);
		store_max(_audit.max_retries, retries);
	}

	void decrement_readiness(Task &task)
	{
		if (task.readiness.fetch_sub(1, std::memory_order_acq_rel) != 1)
			return;
		if (_options.auditing)
			_audit.readiness_transitions.fetch_add(1, std::memory_order_relaxed);
		task.state.store(TaskState::ready, std::memory_order_relaxed);
		if (_hooks.on_ready)
			_hooks.on_ready(task);
	}

	EngineOptions _options;
	EngineHooks _hooks;
	AuditCounters _audit;
};

} // namespace taskforge::deps
