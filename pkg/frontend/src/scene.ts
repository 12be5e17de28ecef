/** Renderer-agnostic scene graph mirroring the engine's session state.
 *
 * One node per live entity (cell, artifact, link line, portal); nodes are
 * created and removed only in response to snapshots and engine events, so
 * the scene is always a pure function of the event stream. The three.js
 * layer in main.ts renders these nodes without adding state of its own.
 */

import type {
  ArtifactSnapshot,
  EngineEvent,
  Pose,
  SceneSnapshot,
} from "./protocol.js";

export type NodeType = "cell" | "artifact" | "link" | "portal";

export interface SceneNode {
  id: string;
  type: NodeType;
  pose: Pose;
  visible: boolean;
  data: Record<string, unknown>;
}

const ORIGIN: Pose = { x: 0, y: 0, z: 0, yaw: 0 };

function linkId(artifactId: string): string {
  return `link:${artifactId}`;
}

export class WorkspaceScene {
  readonly nodes = new Map<string, SceneNode>();
  mode: "unified" | "separated" = "unified";
  activeSpace: string | null = null;
  userPose: Pose = { ...ORIGIN };
  focus: Record<string, unknown> | null = null;

  /** Full resync: the scene becomes exactly the snapshot. */
  applySnapshot(snapshot: SceneSnapshot): void {
    this.nodes.clear();
    this.mode = snapshot.mode;
    this.activeSpace = snapshot.active_space;
    this.userPose = { ...snapshot.user_pose };
    this.focus = null;
    for (const cell of snapshot.cells) {
      this.nodes.set(cell.id, {
        id: cell.id,
        type: "cell",
        pose: { ...cell.pose },
        visible: this.notebookVisible(),
        data: {
          window: cell.window,
          kind: cell.kind,
          source: cell.source,
          dirty: cell.dirty,
        },
      });
    }
    for (const artifact of snapshot.artifacts) {
      this.addArtifact(artifact.id, artifact.pose, artifact.space, artifact);
    }
    for (const link of snapshot.links) {
      this.addLink(link.source, link.artifact);
    }
    this.nodes.set("portal", {
      id: "portal",
      type: "portal",
      pose: { ...ORIGIN },
      visible: snapshot.portal_visible,
      data: {},
    });
  }

  /** Incremental update from one engine event. */
  applyEvent(event: EngineEvent): void {
    switch (event.kind) {
      case "PullOut": {
        const pose = event.pose as Pose;
        this.addArtifact(event.artifact_id as string, pose, "notebook", {});
        this.addLink(event.cell_id as string, event.artifact_id as string);
        break;
      }
      case "PortalCross": {
        if (event.direction === "enter") {
          this.activeSpace = "artifact";
          this.addArtifact(event.artifact_id as string, ORIGIN, "artifact", {});
          this.addLink(event.cell_id as string, event.artifact_id as string);
        } else {
          this.activeSpace = "notebook";
          for (const id of (event.carried as string[]) ?? []) {
            const node = this.nodes.get(id);
            if (node !== undefined) node.data.space = "notebook";
          }
        }
        this.refreshVisibility();
        break;
      }
      case "MergeVis": {
        const pose = event.pose as Pose;
        this.addArtifact(
          event.vis_id as string,
          pose,
          this.mode === "separated" ? "artifact" : "notebook",
          { kind: "Scatter2D" },
        );
        this.addLink(event.table_id as string, event.vis_id as string);
        break;
      }
      case "PutInCreate":
      case "PutInUpdate":
      case "Delete":
        this.removeArtifact(event.artifact_id as string);
        break;
      case "ApplyVisToTable":
        this.nodes.delete(linkId(event.vis_id as string));
        break;
      case "Edit": {
        const cell = this.nodes.get(event.cell_id as string);
        if (cell !== undefined) {
          cell.data.source = event.source;
          cell.data.dirty = true;
        }
        break;
      }
      case "Execute": {
        const cell = this.nodes.get(event.cell_id as string);
        if (cell !== undefined && event.status === "Ok") {
          cell.data.dirty = false;
        }
        break;
      }
      case "Move":
        this.userPose = { ...(event.pose as Pose) };
        break;
      case "FocusChange":
        this.focus = event.region as Record<string, unknown>;
        break;
      default:
        break; // table/vis data edits do not change scene topology
    }
  }

  cellNodes(): SceneNode[] {
    return [...this.nodes.values()].filter((n) => n.type === "cell");
  }

  artifactNode(id: string): SceneNode | undefined {
    const node = this.nodes.get(id);
    return node?.type === "artifact" ? node : undefined;
  }

  linkNode(artifactId: string): SceneNode | undefined {
    return this.nodes.get(linkId(artifactId));
  }

  portalVisible(): boolean {
    return this.nodes.get("portal")?.visible ?? false;
  }

  /** Stable serialization for scene-diff checks. */
  serialize(): string {
    const entries = [...this.nodes.entries()].sort(([a], [b]) =>
      a.localeCompare(b),
    );
    return JSON.stringify({
      mode: this.mode,
      activeSpace: this.activeSpace,
      userPose: this.userPose,
      nodes: entries,
    });
  }

  private notebookVisible(): boolean {
    return this.mode === "unified" || this.activeSpace === "notebook";
  }

  private addArtifact(
    id: string,
    pose: Pose,
    space: string,
    extra: Partial<ArtifactSnapshot>,
  ): void {
    const { id: _id, pose: _pose, ...data } = extra;
    this.nodes.set(id, {
      id,
      type: "artifact",
      pose: { ...pose },
      visible: this.mode === "unified" || space === this.activeSpace,
      data: { ...data, space },
    });
  }

  private removeArtifact(id: string): void {
    this.nodes.delete(id);
    this.nodes.delete(linkId(id));
  }

  private addLink(sourceId: string, artifactId: string): void {
    this.nodes.set(linkId(artifactId), {
      id: linkId(artifactId),
      type: "link",
      pose: { ...ORIGIN },
      visible: this.artifactNode(artifactId)?.visible ?? true,
      data: { source: sourceId, artifact: artifactId },
    });
  }

  private refreshVisibility(): void {
    for (const node of this.nodes.values()) {
      if (node.type === "cell") {
        node.visible = this.notebookVisible();
      } else if (node.type === "artifact") {
        node.visible =
          this.mode === "unified" || node.data.space === this.activeSpace;
      } else if (node.type === "link") {
        node.visible =
          this.artifactNode(node.data.artifact as string)?.visible ?? false;
      }
    }
  }
}
