import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'jsdom',
    globalSetup: './tests/globalSetup.ts',
    testTimeout: 30000,
    hookTimeout: 30000,
    // Forked workers: sockets opened by fetch() die with the fork instead of
    // keeping the runner alive after the suite finishes.
    pool: 'forks',
  },
});
