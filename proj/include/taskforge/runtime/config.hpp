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
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taskforge/platform.hpp"
#include "taskforge/sched/ready_queue.hpp"
#include "taskforge/sched/scheduler.hpp"

namespace taskforge {

//! Runtime settings. Fixed once a run starts.
//!
//! Keys (file lines `key = value`, `#` comments; environment overrides use
//! TASKFORGE_ plus the key uppercased with dots turned into underscores):
//!   workers, pin, scheduler.policy, scheduler.sync, scheduler.nq,
//!   scheduler.capacity, scheduler.redrain, dependency.auditing,
//!   dependency.cas_loop, trace.enabled, trace.dir, trace.subbuffers
struct RuntimeConfig {
	std::size_t workers = hardware_threads();
	bool pin = true;
	sched::PolicyKind policy = sched::PolicyKind::fifo;
	sched::SyncMode sync = sched::SyncMode::dtlock;
	//! 0 selects the default: NUMA node count, else max(1, workers / 16).
	std::size_t queues = 0;
	std::size_t capacity = 512;
	bool redrain = false;
	bool auditing = false;
	bool cas_loop = false;
	bool trace_enabled = false;
	std::filesystem::path trace_dir = ".";
	std::size_t trace_subbuffers = 32;

	static const std::vector<std::string_view> &keys()
	{
		static const std::vector<std::string_view> all = {"workers", "pin", "scheduler.policy",
			"scheduler.sync", "scheduler.nq", "scheduler.capacity", "scheduler.redrain",
			"dependency.auditing", "dependency.cas_loop", "trace.enabled", "trace.dir",
			"trace.subbuffers"};
		return all;
	}

	//! Throws std::invalid_argument on unknown keys or malformed values.
	void set(std::string_view key, std::string_view value)
	{
		if (key == "workers") {
			workers = parse_count(key, value, 1);
		} else if (key == "pin") {
			pin = parse_bool(key, value);
		} else if (key == "scheduler.policy") {
			policy = sched::parse_policy(value);
		} else if (key == "scheduler.sync") {
			sync = sched::parse_sync_mode(value);
		} else if (key == "scheduler.nq") {
			queues = parse_count(key, value, 0);
		} else if (key == "scheduler.capacity") {
			capacity = parse_count(key, value, 1);
		} else if (key == "scheduler.redrain") {
			redrain = parse_bool(key, value);
		} else if (key == "dependency.auditing") {
			auditing = parse_bool(key, value);
		} else if (key == "dependency.cas_loop") {
			cas_loop = parse_bool(key, value);
		} else if (key == "trace.enabled") {
			trace_enabled = parse_bool(key, value);
		} else if (key == "trace.dir") {
			trace_dir = std::string(value);
		} else if (key == "trace.subbuffers") {
			trace_subbuffers = parse_count(key, value, 2);
		} else {
			throw std::invalid_argument("unknown config key: " + std::string(key));
		}
	}

	void load_file(const std::filesystem::path &path)
	{
		std::ifstream in(path);
		if (!in)
			throw std::invalid_argument("cannot open config file: " + path.string());
		std::string line;
		int number = 0;
		while (std::getline(in, line)) {
			++number;
			std::string_view view = trim(line);
			if (view.empty() || view.front() == '#')
				continue;
			const auto eq = view.find('=');
			if (eq == std::string_view::npos) {
				throw std::invalid_argument(
					path.string() + ":" + std::to_string(number) + ": expected key = value");
			}
			set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
		}
	}

	//! Applies TASKFORGE_* variables for every known key that is set.
	void apply_environment()
	{
		for (std::string_view key : keys()) {
			if (const char *value = std::getenv(env_name(key).c_str()))
				set(key, value);
		}
	}

	static std::string env_name(std::string_view key)
	{
		std::string name = "TASKFORGE_";
		for (char c : key)
			name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
		return name;
	}

	std::size_t effective_queues() const
	{
		if (queues != 0)
			return std::clamp<std::size_t>(queues, 1, workers);
		const std::size_t nodes = numa_node_count();
		if (nodes > 1)
			return std::min(nodes, workers);
		return std::max<std::size_t>(1, workers / 16);
	}

	static std::size_t numa_node_count()
	{
		std::error_code ec;
		std::size_t nodes = 0;
		for (const auto &entry :
			std::filesystem::directory_iterator("/sys/devices/system/node", ec)) {
			const std::string name = entry.path().filename().string();
			if (name.rfind("node", 0) == 0 && name.size() > 4
				&& std::isdigit(static_cast<unsigned char>(name[4])))
				++nodes;
		}
		return nodes;
	}

private:
	static std::string_view trim(std::string_view s)
	{
		while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
			s.remove_prefix(1);
		while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
			s.remove_suffix(1);
		return s;
	}

	static bool parse_bool(std::string_view key, std::string_view value)
	{
		if (value == "1" || value == "true" || value == "on" || value == "yes")
			return true;
		if (value == "0" || value == "false" || value == "off" || value == "no")
			return false;
		throw std::invalid_argument(
			"bad boolean for " + std::string(key) + ": " + std::string(value));
	}

	static std::size_t parse_count(std::string_view key, std::string_view value, std::size_t min)
	{
		std::size_t parsed = 0;
		const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
		if (ec != std::errc() || ptr != value.data() + value.size() || parsed < min) {
			throw std::invalid_argument(
				"bad count for " + std::string(key) + ": " + std::string(value));
		}
		return parsed;
	}
};

} // namespace taskforge
