import { startApp } from "./app.js";

window.addEventListener("DOMContentLoaded", () => startApp());
