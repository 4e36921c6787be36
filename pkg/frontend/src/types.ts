// Ops WebSocket message shapes (the server's JSON event feed).

export interface OpsEvent {
  t: number; // server-assigned milliseconds
  type: string;
  [key: string]: unknown;
}

export interface WorldDisc {
  x: number;
  y: number;
  r: number;
  id?: string;
  name?: string;
}

export interface WorldSnapshot {
  obstacles: WorldDisc[];
  objects: WorldDisc[];
  drop_zones: WorldDisc[];
}

export interface SnapshotMessage {
  type: "snapshot";
  world: WorldSnapshot | null;
  robot_serial: number | null;
}

export interface Pose {
  x: number;
  y: number;
  theta: number;
}

export interface LogEntry {
  t: number;
  line: string;
}
