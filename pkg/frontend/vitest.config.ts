import { defineConfig } from "vitest/config";

export default defineConfig({
  resolve: {
    // sources import sibling modules with .js suffixes (browser ESM output);
    // map those back onto the .ts files for the test transform
    alias: [{ find: /^(\.{1,2}\/.*)\.js$/, replacement: "$1" }],
  },
  test: {
    environment: "jsdom",
    include: ["test/**/*.test.ts"],
  },
});
