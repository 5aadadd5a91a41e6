export * from "./document.js";
export * from "./render.js";
export * from "./screen.js";
export * from "./session.js";
export * from "./wire.js";
