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
#include <deque>
#include <unordered_map>

#include "taskforge/deps/access_flags.hpp"

namespace taskforge {
struct Task;
}

namespace taskforge::deps {

enum class AccessType : std::uint8_t {
	read,
	write,
	readwrite,
};

inline const char *to_string(AccessType type) noexcept
{
	switch (type) {
		case AccessType::read:
			return "read";
		case AccessType::write:
			return "write";
		case AccessType::readwrite:
			return "readwrite";
	}
	return "?";
}

//! One dependency as declared by the user: an opaque key and an access type.
struct AccessDecl {
	std::uint64_t address = 0;
	AccessType type = AccessType::read;

	bool operator==(const AccessDecl &) const = default;
};

//! One registered dependency of a task; hosts an atomic state machine.
//!
//! successor and child are written once by the registering thread before the
//! matching *_LINKED flag is delivered, so any thread that observes the flag in
//! a fetch-or result also observes the link. parent and owner are immutable
//! after registration.
struct DataAccess {
	std::uint64_t address = 0;
	AccessType type = AccessType::read;
	std::atomic<AccessFlags::bits_type> flags{0};
	std::atomic<DataAccess *> successor{nullptr};
	std::atomic<DataAccess *> child{nullptr};
	DataAccess *parent = nullptr;
	Task *owner = nullptr;
	//! Deliveries received; maintained only when auditing.
	std::atomic<std::uint8_t> deliveries{0};

	AccessFlags load_flags(std::memory_order order = std::memory_order_acquire) const noexcept
	{
		return AccessFlags(flags.load(order));
	}
};

struct DataAccessMessage {
	AccessFlags flags_for_next;
	AccessFlags flags_after_propagation;
	DataAccess *from = nullptr;
	DataAccess *to = nullptr;
};

//! Per-worker queue of undelivered messages. Never shared between threads.
class MailBox {
public:
	void push(const DataAccessMessage &message) { _messages.push_back(message); }

	DataAccessMessage pop()
	{
		DataAccessMessage message = _messages.front();
		_messages.pop_front();
		return message;
	}

	bool empty() const noexcept { return _messages.empty(); }
	std::size_t size() const noexcept { return _messages.size(); }

private:
	std::deque<DataAccessMessage> _messages;
};

//! The set of accesses registered by the children of one task.
//!
//! Only the owner's thread registers into a domain, so the bottom map needs no
//! synchronization.
struct DependencyDomain {
	explicit DependencyDomain(Task *owner_task) : owner(owner_task)
	{
		live_counter().fetch_add(1, std::memory_order_relaxed);
	}
	DependencyDomain(const DependencyDomain &) = delete;
	DependencyDomain &operator=(const DependencyDomain &) = delete;
	~DependencyDomain() { live_counter().fetch_sub(1, std::memory_order_relaxed); }

	//! Domains currently alive in the process.
	static std::int64_t live() noexcept { return live_counter().load(std::memory_order_relaxed); }

	//! Latest registered access per address.
	std::unordered_map<std::uint64_t, DataAccess *> bottom_map;
	//! The owner's own accesses by address, used to link child chains.
	std::unordered_map<std::uint64_t, DataAccess *> owner_accesses;
	Task *owner;
	std::atomic<bool> sealed{false};

private:
	static std::atomic<std::int64_t> &live_counter() noexcept
	{
		static std::atomic<std::int64_t> counter{0};
		return counter;
	}
};

} // namespace taskforge::deps
