import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    testTimeout: 120_000,
    hookTimeout: 60_000,
    // Live-service tests measure latency; run files one at a time so a
    // turbo-mode service in one file cannot steal CPU from another.
    pool: "forks",
    poolOptions: { forks: { singleFork: true } },
  },
});
