/** Gesture-to-command mapping. The UI never mutates domain state locally:
 * every gesture ends in an engine command (or, for a drop in open space,
 * a purely visual reposition of the dragged node).
 */

import type { Command, EngineEvent, Pose } from "./protocol.js";
import type { WorkspaceScene } from "./scene.js";

export const SNAP_RADIUS_M = 0.3;

type Dispatch = (command: Command) => Promise<EngineEvent[]>;

type DragSource =
  | { kind: "cell"; cellId: string }
  | { kind: "artifact"; artifactId: string }
  | { kind: "column"; tableId: string; column: string }
  | { kind: "axis"; visId: string; axisIndex: number };

export type DropTarget =
  | { kind: "cell"; cellId: string }
  | { kind: "artifact"; artifactId: string }
  | { kind: "column"; tableId: string; column: string }
  | { kind: "space" };

function distance(a: Pose, b: Pose): number {
  return Math.hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

export class GestureController {
  private drag: DragSource | null = null;

  constructor(
    private readonly scene: WorkspaceScene,
    private readonly dispatch: Dispatch,
  ) {}

  beginDragFromCell(cellId: string): void {
    this.drag = { kind: "cell", cellId };
  }

  beginDragArtifact(artifactId: string): void {
    this.drag = { kind: "artifact", artifactId };
  }

  beginDragColumn(tableId: string, column: string): void {
    this.drag = { kind: "column", tableId, column };
  }

  beginDragAxis(visId: string, axisIndex: number): void {
    this.drag = { kind: "axis", visId, axisIndex };
  }

  dragging(): boolean {
    return this.drag !== null;
  }

  /** Nearest cell node within the snap radius of a drop position. */
  snapCell(position: Pose): string | null {
    let best: { id: string; d: number } | null = null;
    for (const node of this.scene.cellNodes()) {
      if (!node.visible) continue;
      const d = distance(node.pose, position);
      if (d <= SNAP_RADIUS_M && (best === null || d < best.d)) {
        best = { id: node.id, d };
      }
    }
    return best?.id ?? null;
  }

  /** Finish the drag at a position (and optionally over an explicit target). */
  async drop(position: Pose, target?: DropTarget): Promise<EngineEvent[]> {
    const drag = this.drag;
    this.drag = null;
    if (drag === null) return [];

    if (drag.kind === "cell") {
      // drag-from-cell = pull the cell's artifact out at the drop point
      return this.dispatch({ op: "pull_out", cell_id: drag.cellId, pose: position });
    }

    if (drag.kind === "artifact") {
      const cellId =
        target?.kind === "cell" ? target.cellId : this.snapCell(position);
      if (cellId !== null) {
        return this.dispatch({
          op: "put_in",
          artifact_id: drag.artifactId,
          cell_id: cellId,
        });
      }
      // open-space drop: visual reposition only, no engine command
      const node = this.scene.artifactNode(drag.artifactId);
      if (node !== undefined) node.pose = { ...position };
      return [];
    }

    if (drag.kind === "column") {
      if (target?.kind === "column" && target.tableId === drag.tableId) {
        // column onto column = merge the pair into a scatter
        const events: EngineEvent[] = [];
        for (const column of [drag.column, target.column]) {
          events.push(
            ...(await this.dispatch({
              op: "select_column",
              artifact_id: drag.tableId,
              column,
            })),
          );
        }
        events.push(
          ...(await this.dispatch({
            op: "merge_columns",
            table_id: drag.tableId,
            col_a: drag.column,
            col_b: target.column,
            pose: position,
          })),
        );
        return events;
      }
      if (target?.kind === "artifact") {
        // column onto a visualization = add it as a third axis
        return this.dispatch({
          op: "add_axis",
          vis_id: target.artifactId,
          table_id: drag.tableId,
          column: drag.column,
        });
      }
      return [];
    }

    // axis dragged off its visualization = remove it
    return this.dispatch({
      op: "remove_axis",
      vis_id: drag.visId,
      axis_index: drag.axisIndex,
    });
  }

  /** Walk keys / teleport click. */
  moveUser(pose: Pose): Promise<EngineEvent[]> {
    return this.dispatch({ op: "move", pose });
  }

  /** Click on the portal (visible only inside the artifact space). */
  clickPortal(): Promise<EngineEvent[]> {
    return this.dispatch({ op: "exit_portal" });
  }
}
