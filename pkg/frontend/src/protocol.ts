/** Wire types for the session service's websocket message API. */

export interface Pose {
  x: number;
  y: number;
  z: number;
  yaw: number;
}

export type Command = { op: string; t?: number } & Record<string, unknown>;

export type EngineEvent = { kind: string; t: number } & Record<string, unknown>;

export interface CellSnapshot {
  id: string;
  window: string;
  kind: "Data" | "Visualization" | "Code" | "Empty";
  source: string;
  dirty: boolean;
  pose: Pose;
}

export interface ArtifactSnapshot {
  id: string;
  type: "table" | "vis";
  pose: Pose;
  space: string;
  origin_cell: string | null;
  [extra: string]: unknown;
}

export interface LinkSnapshot {
  source: string;
  artifact: string;
}

export interface SceneSnapshot {
  mode: "unified" | "separated";
  active_space: string | null;
  portal_visible: boolean;
  user_pose: Pose;
  cells: CellSnapshot[];
  artifacts: ArtifactSnapshot[];
  links: LinkSnapshot[];
}

export interface ErrorPayload {
  code: string;
  message: string;
}

export interface Reply {
  seq: number;
  ok: boolean;
  events?: EngineEvent[];
  snapshot?: SceneSnapshot;
  error?: ErrorPayload;
}

export type ServerFrame = Reply | { event: EngineEvent };

export function isEventFrame(frame: ServerFrame): frame is { event: EngineEvent } {
  return "event" in frame;
}
