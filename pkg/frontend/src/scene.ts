/**
 * Rotatable contour-surface view: one translucent surface per level with
 * fixed opacities outer to inner, orbit/zoom controls and the three preset
 * viewpoints. Empty levels render as absent layers and are reported back so
 * the caller can show a notice.
 */
import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import { Mesh, MeshBundle } from "./schemas";
import { CameraPose, LEVEL_COLORS, LEVEL_OPACITY } from "./state";

export class SurfaceScene {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  readonly renderer: THREE.WebGLRenderer;
  readonly controls: OrbitControls;
  private surfaces = new THREE.Group();

  constructor(container: HTMLElement) {
    const w = container.clientWidth || 640;
    const h = container.clientHeight || 480;
    this.renderer = new THREE.WebGLRenderer({ antialias: true, alpha: true });
    this.renderer.setSize(w, h);
    container.appendChild(this.renderer.domElement);

    this.camera = new THREE.PerspectiveCamera(45, w / h, 0.1, 100);
    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    this.controls.enableDamping = true;

    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const key = new THREE.DirectionalLight(0xffffff, 1.1);
    key.position.set(5, 7, 4);
    this.scene.add(key);
    const fill = new THREE.DirectionalLight(0xffffff, 0.4);
    fill.position.set(-6, -3, -4);
    this.scene.add(fill);
    this.scene.add(new THREE.AxesHelper(3.2));
    this.scene.add(this.surfaces);

    const animate = () => {
      requestAnimationFrame(animate);
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    };
    animate();
  }

  setPose(pose: CameraPose): void {
    const az = (pose.azimuthDeg * Math.PI) / 180;
    const el = (pose.elevationDeg * Math.PI) / 180;
    this.camera.position.set(
      pose.distance * Math.cos(el) * Math.cos(az),
      pose.distance * Math.cos(el) * Math.sin(az),
      pose.distance * Math.sin(el),
    );
    this.camera.up.set(0, 0, 1);
    this.camera.lookAt(0, 0, 0);
    this.controls.target.set(0, 0, 0);
    this.controls.update();
  }

  /** Replace all surfaces; returns the levels that came back empty. */
  showBundle(bundle: MeshBundle): number[] {
    this.surfaces.clear();
    const missing: number[] = [];
    bundle.levels.forEach((lv, i) => {
      if (lv.mesh.triangles.length === 0) {
        missing.push(lv.level);
        return;
      }
      this.surfaces.add(buildSurface(lv.mesh, i, bundle.levels.length));
    });
    return missing;
  }

  dispose(): void {
    this.renderer.dispose();
  }
}

export function buildSurface(mesh: Mesh, levelIndex: number, nLevels: number): THREE.Mesh {
  const geom = new THREE.BufferGeometry();
  geom.setAttribute("position", new THREE.Float32BufferAttribute(mesh.vertices.flat(), 3));
  geom.setAttribute("normal", new THREE.Float32BufferAttribute(mesh.normals.flat(), 3));
  geom.setIndex(mesh.triangles.flat());
  const slot = nLevels > 1 ? Math.round((levelIndex * (LEVEL_OPACITY.length - 1)) / (nLevels - 1)) : 0;
  const material = new THREE.MeshPhongMaterial({
    color: LEVEL_COLORS[slot],
    transparent: true,
    opacity: LEVEL_OPACITY[slot],
    side: THREE.DoubleSide,
    depthWrite: false,
  });
  return new THREE.Mesh(geom, material);
}

/** Copy the pose of one camera onto another (linked-pane sync, per frame). */
export function syncCamera(src: THREE.PerspectiveCamera, dst: THREE.PerspectiveCamera): void {
  dst.position.copy(src.position);
  dst.quaternion.copy(src.quaternion);
  dst.up.copy(src.up);
  dst.zoom = src.zoom;
  dst.updateProjectionMatrix();
}
