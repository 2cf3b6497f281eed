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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "taskforge/runtime/config.hpp"

using namespace taskforge;
namespace fs = std::filesystem;

TEST(RuntimeConfig, Defaults)
{
	RuntimeConfig config;
	EXPECT_GE(config.workers, 1u);
	EXPECT_TRUE(config.pin);
	EXPECT_EQ(config.sync, sched::SyncMode::dtlock);
	EXPECT_EQ(config.policy, sched::PolicyKind::fifo);
	EXPECT_EQ(config.capacity, 512u);
	EXPECT_FALSE(config.trace_enabled);
	EXPECT_EQ(config.trace_subbuffers, 32u);
}

TEST(RuntimeConfig, SetEveryKey)
{
	RuntimeConfig config;
	config.set("workers", "6");
	config.set("pin", "off");
	config.set("scheduler.policy", "lifo");
	config.set("scheduler.sync", "mutex");
	config.set("scheduler.nq", "3");
	config.set("scheduler.capacity", "64");
	config.set("scheduler.redrain", "true");
	config.set("dependency.auditing", "1");
	config.set("dependency.cas_loop", "yes");
	config.set("trace.enabled", "on");
	config.set("trace.dir", "/tmp/x");
	config.set("trace.subbuffers", "8");
	EXPECT_EQ(config.workers, 6u);
	EXPECT_FALSE(config.pin);
	EXPECT_EQ(config.policy, sched::PolicyKind::lifo);
	EXPECT_EQ(config.sync, sched::SyncMode::mutex);
	EXPECT_EQ(config.queues, 3u);
	EXPECT_EQ(config.capacity, 64u);
	EXPECT_TRUE(config.redrain);
	EXPECT_TRUE(config.auditing);
	EXPECT_TRUE(config.cas_loop);
	EXPECT_TRUE(config.trace_enabled);
	EXPECT_EQ(config.trace_dir, fs::path("/tmp/x"));
	EXPECT_EQ(config.trace_subbuffers, 8u);
	EXPECT_EQ(RuntimeConfig::keys().size(), 12u);
}

TEST(RuntimeConfig, RejectsBadInput)
{
	RuntimeConfig config;
	EXPECT_THROW(config.set("workers", "0"), std::invalid_argument);
	EXPECT_THROW(config.set("workers", "4x"), std::invalid_argument);
	EXPECT_THROW(config.set("workers", "-1"), std::invalid_argument);
	EXPECT_THROW(config.set("pin", "maybe"), std::invalid_argument);
	EXPECT_THROW(config.set("scheduler.sync", "rwlock"), std::invalid_argument);
	EXPECT_THROW(config.set("trace.subbuffers", "1"), std::invalid_argument);
	EXPECT_THROW(config.set("colour", "blue"), std::invalid_argument);
}

TEST(RuntimeConfig, EnvironmentNames)
{
	EXPECT_EQ(RuntimeConfig::env_name("workers"), "TASKFORGE_WORKERS");
	EXPECT_EQ(RuntimeConfig::env_name("scheduler.nq"), "TASKFORGE_SCHEDULER_NQ");
	EXPECT_EQ(RuntimeConfig::env_name("dependency.cas_loop"), "TASKFORGE_DEPENDENCY_CAS_LOOP");
}

TEST(RuntimeConfig, EnvironmentOverrides)
{
	::setenv("TASKFORGE_WORKERS", "3", 1);
	::setenv("TASKFORGE_SCHEDULER_SYNC", "ptlock", 1);
	RuntimeConfig config;
	config.apply_environment();
	::unsetenv("TASKFORGE_WORKERS");
	::unsetenv("TASKFORGE_SCHEDULER_SYNC");
	EXPECT_EQ(config.workers, 3u);
	EXPECT_EQ(config.sync, sched::SyncMode::ptlock);
}

TEST(RuntimeConfig, LoadFile)
{
	const fs::path path = fs::temp_directory_path() / "taskforge_config_test.conf";
	{
		std::ofstream out(path);
		out << "# comment\n\n  workers = 5  \nscheduler.policy=lifo\n";
	}
	RuntimeConfig config;
	config.load_file(path);
	EXPECT_EQ(config.workers, 5u);
	EXPECT_EQ(config.policy, sched::PolicyKind::lifo);

	{
		std::ofstream out(path);
		out << "workers = 2\njust text\n";
	}
	try {
		config.load_file(path);
		FAIL() << "expected a parse error";
	} catch (const std::invalid_argument &error) {
		EXPECT_NE(std::string(error.what()).find(":2:"), std::string::npos);
	}
	fs::remove(path);
	EXPECT_THROW(config.load_file(path), std::invalid_argument);
}

TEST(RuntimeConfig, EffectiveQueues)
{
	RuntimeConfig config;
	config.workers = 8;
	config.queues = 3;
	EXPECT_EQ(config.effective_queues(), 3u);
	config.queues = 20;
	EXPECT_EQ(config.effective_queues(), 8u);
	config.queues = 0;
	const std::size_t nodes = RuntimeConfig::numa_node_count();
	if (nodes > 1) {
		EXPECT_EQ(config.effective_queues(), std::min<std::size_t>(nodes, 8));
	} else {
		EXPECT_EQ(config.effective_queues(), 1u);
		config.workers = 64;
		EXPECT_EQ(config.effective_queues(), 4u);
	}
}
