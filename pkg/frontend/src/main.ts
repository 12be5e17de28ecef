/** Browser entry point: renders the workspace scene with three.js and
 * wires DOM input to the gesture controller. Domain state lives entirely
 * in the engine; this file only mirrors it.
 */

import * as THREE from "three";

import { SessionClient, type SocketLike } from "./client.js";
import { GestureController } from "./gestures.js";
import type { EngineEvent } from "./protocol.js";
import { WorkspaceScene, type SceneNode } from "./scene.js";

const NODE_COLORS: Record<string, number> = {
  Data: 0x4f83cc,
  Visualization: 0xcc7a4f,
  Code: 0x9e9e9e,
  Empty: 0xdddddd,
};

export class WorkspaceRenderer {
  private readonly three = new THREE.Scene();
  private readonly meshes = new Map<string, THREE.Object3D>();
  private readonly camera: THREE.PerspectiveCamera;
  private readonly renderer: THREE.WebGLRenderer;

  constructor(
    private readonly scene: WorkspaceScene,
    canvas: HTMLCanvasElement,
  ) {
    this.camera = new THREE.PerspectiveCamera(
      70,
      canvas.clientWidth / canvas.clientHeight,
      0.01,
      50,
    );
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.three.add(new THREE.AmbientLight(0xffffff, 0.8));
  }

  /** Rebuild meshes to match the scene graph, then draw one frame. */
  render(): void {
    const live = new Set<string>();
    for (const node of this.scene.nodes.values()) {
      live.add(node.id);
      let mesh = this.meshes.get(node.id);
      if (mesh === undefined) {
        mesh = this.buildMesh(node);
        this.meshes.set(node.id, mesh);
        this.three.add(mesh);
      }
      mesh.visible = node.visible;
      if (node.type === "link") {
        this.layoutLink(mesh as THREE.Line, node);
      } else {
        mesh.position.set(node.pose.x, node.pose.y, node.pose.z);
        mesh.rotation.y = node.pose.yaw;
      }
    }
    for (const [id, mesh] of this.meshes) {
      if (!live.has(id)) {
        this.three.remove(mesh);
        this.meshes.delete(id);
      }
    }
    const pose = this.scene.userPose;
    this.camera.position.set(pose.x, pose.y + 1.6, pose.z);
    this.camera.rotation.y = pose.yaw;
    this.renderer.render(this.three, this.camera);
  }

  private buildMesh(node: SceneNode): THREE.Object3D {
    if (node.type === "cell") {
      const color = NODE_COLORS[String(node.data.kind)] ?? 0xffffff;
      return new THREE.Mesh(
        new THREE.PlaneGeometry(0.5, 0.3),
        new THREE.MeshBasicMaterial({ color, side: THREE.DoubleSide }),
      );
    }
    if (node.type === "artifact") {
      return new THREE.Mesh(
        new THREE.BoxGeometry(0.4, 0.3, 0.02),
        new THREE.MeshBasicMaterial({ color: 0x66bb6a }),
      );
    }
    if (node.type === "portal") {
      return new THREE.Mesh(
        new THREE.TorusGeometry(0.6, 0.05, 12, 48),
        new THREE.MeshBasicMaterial({ color: 0xab47bc }),
      );
    }
    const geometry = new THREE.BufferGeometry().setFromPoints([
      new THREE.Vector3(),
      new THREE.Vector3(),
    ]);
    return new THREE.Line(
      geometry,
      new THREE.LineBasicMaterial({ color: 0xffee58 }),
    );
  }

  private layoutLink(line: THREE.Line, node: SceneNode): void {
    const from = this.scene.nodes.get(String(node.data.source));
    const to = this.scene.nodes.get(String(node.data.artifact));
    if (from === undefined || to === undefined) return;
    line.geometry.setFromPoints([
      new THREE.Vector3(from.pose.x, from.pose.y, from.pose.z),
      new THREE.Vector3(to.pose.x, to.pose.y, to.pose.z),
    ]);
  }
}

function toast(message: string): void {
  const el = document.getElementById("toast");
  if (el !== null) {
    el.textContent = message;
    el.classList.add("visible");
    setTimeout(() => el.classList.remove("visible"), 2500);
  }
}

export async function start(url: string, canvas: HTMLCanvasElement): Promise<void> {
  const scene = new WorkspaceScene();
  const client = new SessionClient(
    url,
    (u) => new WebSocket(u) as unknown as SocketLike,
  );
  const renderer = new WorkspaceRenderer(scene, canvas);
  const gestures = new GestureController(scene, async (command) => {
    try {
      return await client.dispatch(command);
    } catch (err) {
      toast(String(err));
      return [] as EngineEvent[];
    }
  });

  await client.connect();
  scene.applySnapshot(await client.snapshot());
  client.onEvent((event) => {
    scene.applyEvent(event);
    renderer.render();
  });
  client.onClose(() => {
    // reconnect and resync from a fresh snapshot
    void start(url, canvas);
  });

  window.addEventListener("keydown", (ev) => {
    const pose = { ...scene.userPose };
    const step = 0.2;
    if (ev.key === "w") pose.z -= step;
    else if (ev.key === "s") pose.z += step;
    else if (ev.key === "a") pose.x -= step;
    else if (ev.key === "d") pose.x += step;
    else return;
    void gestures.moveUser(pose);
  });

  renderer.render();
}
