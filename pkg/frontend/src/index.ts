export * from "./protocol.js";
export * from "./client.js";
export * from "./scene.js";
export * from "./gestures.js";
