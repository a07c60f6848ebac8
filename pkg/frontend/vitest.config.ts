import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the end-to-end test boots the real review service in a child process
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
